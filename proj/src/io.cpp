#include "geosearch/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "geosearch/varint.hpp"

namespace geosearch {

namespace {

[[noreturn]] void io_fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what +
                             (errno != 0 ? std::string(": ") + std::strerror(errno) : ""));
}

constexpr std::size_t kWriteBufferSize = 1 << 20;

}  // namespace

FileWriter::FileWriter(const std::filesystem::path& path, const char magic[4]) : path_(path) {
    errno = 0;
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd_ < 0) {
        io_fail(path_, "cannot open for writing");
    }
    buffer_.reserve(kWriteBufferSize);
    put_bytes(magic, 4);
    put_u32(kFormatVersion);
}

FileWriter::~FileWriter() {
    if (fd_ >= 0) {
        try {
            close();
        } catch (...) {
        }
    }
}

void FileWriter::put_bytes(const void* data, std::size_t len) {
    const uint8_t* p = static_cast<const uint8_t*>(data);
    buffer_.insert(buffer_.end(), p, p + len);
    offset_ += len;
    if (buffer_.size() >= kWriteBufferSize) {
        flush_buffer();
    }
}

void FileWriter::flush_buffer() {
    std::size_t done = 0;
    while (done < buffer_.size()) {
        ssize_t n = ::write(fd_, buffer_.data() + done, buffer_.size() - done);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            io_fail(path_, "write failed at offset " + std::to_string(offset_));
        }
        done += static_cast<std::size_t>(n);
    }
    buffer_.clear();
}

void FileWriter::close() {
    flush_buffer();
    int fd = std::exchange(fd_, -1);
    if (::close(fd) != 0) {
        io_fail(path_, "close failed");
    }
}

void ByteCursor::need(std::size_t n) const {
    if (remaining() < n) {
        throw std::runtime_error(context_ + ": truncated (need " + std::to_string(n) +
                                 " bytes, have " + std::to_string(remaining()) + ")");
    }
}

uint64_t ByteCursor::varint() {
    return get_varint(p_, end_);
}

uint32_t ByteCursor::varint32() {
    return get_varint32(p_, end_);
}

std::string ByteCursor::str(std::size_t len) {
    need(len);
    std::string s(reinterpret_cast<const char*>(p_), len);
    p_ += len;
    return s;
}

std::vector<uint8_t> read_payload(const std::filesystem::path& path, const char magic[4]) {
    errno = 0;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        io_fail(path, "cannot open");
    }
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < kFileHeaderSize) {
        throw std::runtime_error(path.string() + ": missing file header");
    }
    if (std::memcmp(bytes.data(), magic, 4) != 0) {
        throw std::runtime_error(path.string() + ": bad magic (expected " + std::string(magic, 4) + ")");
    }
    uint32_t version;
    std::memcpy(&version, bytes.data() + 4, 4);
    if (version != kFormatVersion) {
        throw std::runtime_error(path.string() + ": unsupported format version " + std::to_string(version));
    }
    bytes.erase(bytes.begin(), bytes.begin() + kFileHeaderSize);
    return bytes;
}

RandomAccessFile::RandomAccessFile(const std::filesystem::path& path, const char magic[4]) : path_(path) {
    errno = 0;
    fd_ = ::open(path.c_str(), O_RDONLY);
    if (fd_ < 0) {
        io_fail(path_, "cannot open");
    }
    off_t end = ::lseek(fd_, 0, SEEK_END);
    if (end < 0) {
        io_fail(path_, "cannot determine size");
    }
    size_ = static_cast<uint64_t>(end);
    if (size_ < kFileHeaderSize) {
        throw std::runtime_error(path_.string() + ": missing file header");
    }
    uint8_t header[kFileHeaderSize];
    read_into(0, kFileHeaderSize, header);
    if (std::memcmp(header, magic, 4) != 0) {
        throw std::runtime_error(path_.string() + ": bad magic (expected " + std::string(magic, 4) + ")");
    }
    uint32_t version;
    std::memcpy(&version, header + 4, 4);
    if (version != kFormatVersion) {
        throw std::runtime_error(path_.string() + ": unsupported format version " + std::to_string(version));
    }
}

RandomAccessFile::~RandomAccessFile() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

RandomAccessFile::RandomAccessFile(RandomAccessFile&& o) noexcept
    : path_(std::move(o.path_)), fd_(std::exchange(o.fd_, -1)), size_(o.size_) {}

RandomAccessFile& RandomAccessFile::operator=(RandomAccessFile&& o) noexcept {
    if (this != &o) {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        path_ = std::move(o.path_);
        fd_ = std::exchange(o.fd_, -1);
        size_ = o.size_;
    }
    return *this;
}

std::vector<uint8_t> RandomAccessFile::read(uint64_t offset, std::size_t len) const {
    std::vector<uint8_t> out(len);
    read_into(offset, len, out.data());
    return out;
}

void RandomAccessFile::read_into(uint64_t offset, std::size_t len, uint8_t* out) const {
    if (offset + len > size_) {
        throw std::runtime_error(path_.string() + ": read past end of file (offset " +
                                 std::to_string(offset) + ", length " + std::to_string(len) + ")");
    }
    std::size_t done = 0;
    while (done < len) {
        errno = 0;
        ssize_t n = ::pread(fd_, out + done, len - done, static_cast<off_t>(offset + done));
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            io_fail(path_, "pread failed at offset " + std::to_string(offset + done));
        }
        if (n == 0) {
            throw std::runtime_error(path_.string() + ": truncated file");
        }
        done += static_cast<std::size_t>(n);
    }
}

}  // namespace geosearch
