#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace geosearch {

// All index files are little-endian and start with a 4-byte magic plus a
// 32-bit format version.
constexpr uint32_t kFormatVersion = 1;
constexpr std::size_t kFileHeaderSize = 8;

static_assert(std::endian::native == std::endian::little,
              "on-disk formats are little-endian; big-endian hosts are unsupported");

// Buffered writer for one index file.
class FileWriter {
  public:
    FileWriter(const std::filesystem::path& path, const char magic[4]);
    ~FileWriter();
    FileWriter(const FileWriter&) = delete;
    FileWriter& operator=(const FileWriter&) = delete;

    void put_bytes(const void* data, std::size_t len);
    void put_u8(uint8_t v) { put_bytes(&v, 1); }
    void put_u16(uint16_t v) { put_bytes(&v, 2); }
    void put_u32(uint32_t v) { put_bytes(&v, 4); }
    void put_u64(uint64_t v) { put_bytes(&v, 8); }
    void put_f64(double v) { put_bytes(&v, 8); }

    uint64_t offset() const { return offset_; }

    // Flushes and closes; throws on I/O failure. Called by the destructor if
    // not invoked explicitly, but then errors are swallowed.
    void close();

  private:
    void flush_buffer();

    std::filesystem::path path_;
    int fd_ = -1;
    std::vector<uint8_t> buffer_;
    uint64_t offset_ = 0;
};

// Bounds-checked parser over an in-memory byte range.
class ByteCursor {
  public:
    ByteCursor(const uint8_t* begin, const uint8_t* end, std::string context)
        : p_(begin), end_(end), context_(std::move(context)) {}

    bool at_end() const { return p_ == end_; }
    std::size_t remaining() const { return static_cast<std::size_t>(end_ - p_); }

    uint8_t u8() { return take<uint8_t>(); }
    uint16_t u16() { return take<uint16_t>(); }
    uint32_t u32() { return take<uint32_t>(); }
    uint64_t u64() { return take<uint64_t>(); }
    double f64() { return take<double>(); }
    uint64_t varint();
    uint32_t varint32();
    std::string str(std::size_t len);

  private:
    template <typename T>
    T take() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, p_, sizeof(T));
        p_ += sizeof(T);
        return v;
    }
    void need(std::size_t n) const;

    const uint8_t* p_;
    const uint8_t* end_;
    std::string context_;
};

// Reads a whole file, validates magic and version, returns the payload.
std::vector<uint8_t> read_payload(const std::filesystem::path& path, const char magic[4]);

// Random-access reader for the large record files (postings, footprints,
// toeprints). Stateless reads, safe to share across concurrent queries.
class RandomAccessFile {
  public:
    RandomAccessFile() = default;
    RandomAccessFile(const std::filesystem::path& path, const char magic[4]);
    ~RandomAccessFile();
    RandomAccessFile(RandomAccessFile&& o) noexcept;
    RandomAccessFile& operator=(RandomAccessFile&& o) noexcept;
    RandomAccessFile(const RandomAccessFile&) = delete;
    RandomAccessFile& operator=(const RandomAccessFile&) = delete;

    bool is_open() const { return fd_ >= 0; }
    uint64_t size() const { return size_; }
    const std::filesystem::path& path() const { return path_; }

    // Reads exactly [offset, offset+len); throws on short reads.
    std::vector<uint8_t> read(uint64_t offset, std::size_t len) const;
    void read_into(uint64_t offset, std::size_t len, uint8_t* out) const;

  private:
    std::filesystem::path path_;
    int fd_ = -1;
    uint64_t size_ = 0;
};

}  // namespace geosearch
