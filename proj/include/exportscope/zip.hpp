#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace exportscope {

// Random-access byte source behind a zip archive. Implementations must allow
// concurrent read_at calls.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual std::uint64_t size() const = 0;
  // Reads exactly `length` bytes at `offset` or throws ArchiveFormatError.
  virtual void read_at(std::uint64_t offset, std::size_t length, char* out) const = 0;
};

std::unique_ptr<ByteSource> memory_source(std::string bytes);
std::unique_ptr<ByteSource> file_source(const std::filesystem::path& path);

struct ZipEntry {
  std::string name;  // raw entry name, decoded to UTF-8
  std::uint64_t compressed_size = 0;
  std::uint64_t uncompressed_size = 0;
  std::uint16_t method = 0;
  std::uint16_t flags = 0;
  std::uint32_t crc32 = 0;
  std::uint64_t local_header_offset = 0;

  bool is_dir() const { return !name.empty() && (name.back() == '/' || name.back() == '\\'); }
};

// Read-only view of a zip archive's central directory. Supports stored and
// deflated entries and zip64 sizes/offsets.
class ZipArchive {
 public:
  explicit ZipArchive(std::unique_ptr<ByteSource> source);

  static ZipArchive open_file(const std::filesystem::path& path);
  static ZipArchive from_bytes(std::string bytes);

  const std::vector<ZipEntry>& entries() const { return entries_; }

  // Decompresses one entry and verifies its CRC. Throws ArchiveFormatError.
  std::string read(const ZipEntry& entry) const;

 private:
  std::unique_ptr<ByteSource> source_;
  std::vector<ZipEntry> entries_;
};

// Builds a deterministic archive in memory: fixed timestamps, UTF-8 names,
// entries in insertion order.
class ZipWriter {
 public:
  void add(std::string name, std::string_view data, bool compress = true);
  std::string finish();

 private:
  struct Pending {
    std::string name;
    std::uint32_t crc32;
    std::uint16_t method;
    std::uint64_t compressed_size;
    std::uint64_t uncompressed_size;
    std::uint64_t offset;
  };
  std::string out_;
  std::vector<Pending> central_;
};

std::uint32_t crc32_of(std::string_view data);

}  // namespace exportscope
