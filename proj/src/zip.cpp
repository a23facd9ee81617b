#include "exportscope/zip.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <array>
#include <cstring>

#include "exportscope/error.hpp"
#include "exportscope/text.hpp"

namespace exportscope {

namespace {

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSig = 0x02014b50;
constexpr std::uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr std::uint32_t kZip64EndSig = 0x06064b50;
constexpr std::uint32_t kZip64LocatorSig = 0x07064b50;
constexpr std::uint16_t kFlagEncrypted = 0x0001;
constexpr std::uint16_t kFlagUtf8 = 0x0800;
constexpr std::uint16_t kMethodStored = 0;
constexpr std::uint16_t kMethodDeflate = 8;
// 1980-01-01 00:00:00 in DOS format.
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;
constexpr std::uint16_t kDosTime = 0;

// Code page 437, bytes 0x80..0xFF.
constexpr std::array<char32_t, 128> kCp437High = {
    0x00C7, 0x00FC, 0x00E9, 0x00E2, 0x00E4, 0x00E0, 0x00E5, 0x00E7, 0x00EA, 0x00EB, 0x00E8,
    0x00EF, 0x00EE, 0x00EC, 0x00C4, 0x00C5, 0x00C9, 0x00E6, 0x00C6, 0x00F4, 0x00F6, 0x00F2,
    0x00FB, 0x00F9, 0x00FF, 0x00D6, 0x00DC, 0x00A2, 0x00A3, 0x00A5, 0x20A7, 0x0192, 0x00E1,
    0x00ED, 0x00F3, 0x00FA, 0x00F1, 0x00D1, 0x00AA, 0x00BA, 0x00BF, 0x2310, 0x00AC, 0x00BD,
    0x00BC, 0x00A1, 0x00AB, 0x00BB, 0x2591, 0x2592, 0x2593, 0x2502, 0x2524, 0x2561, 0x2562,
    0x2556, 0x2555, 0x2563, 0x2551, 0x2557, 0x255D, 0x255C, 0x255B, 0x2510, 0x2514, 0x2534,
    0x252C, 0x251C, 0x2500, 0x253C, 0x255E, 0x255F, 0x255A, 0x2554, 0x2569, 0x2566, 0x2560,
    0x2550, 0x256C, 0x2567, 0x2568, 0x2564, 0x2565, 0x2559, 0x2558, 0x2552, 0x2553, 0x256B,
    0x256A, 0x2518, 0x250C, 0x2588, 0x2584, 0x258C, 0x2590, 0x2580, 0x03B1, 0x00DF, 0x0393,
    0x03C0, 0x03A3, 0x03C3, 0x00B5, 0x03C4, 0x03A6, 0x0398, 0x03A9, 0x03B4, 0x221E, 0x03C6,
    0x03B5, 0x2229, 0x2261, 0x00B1, 0x2265, 0x2264, 0x2320, 0x2321, 0x00F7, 0x2248, 0x00B0,
    0x2219, 0x00B7, 0x221A, 0x207F, 0x00B2, 0x25A0, 0x00A0,
};

std::string cp437_to_utf8(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else {
      append_utf8(out, kCp437High[c - 0x80]);
    }
  }
  return out;
}

std::uint16_t le16(const char* p) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) |
                                    (static_cast<unsigned char>(p[1]) << 8));
}

std::uint32_t le32(const char* p) {
  return static_cast<std::uint32_t>(le16(p)) | (static_cast<std::uint32_t>(le16(p + 2)) << 16);
}

std::uint64_t le64(const char* p) {
  return static_cast<std::uint64_t>(le32(p)) | (static_cast<std::uint64_t>(le32(p + 4)) << 32);
}

void put16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xff);
  out += static_cast<char>(v >> 8);
}

void put32(std::string& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v & 0xffff));
  put16(out, static_cast<std::uint16_t>(v >> 16));
}

class MemorySource final : public ByteSource {
 public:
  explicit MemorySource(std::string bytes) : bytes_(std::move(bytes)) {}
  std::uint64_t size() const override { return bytes_.size(); }
  void read_at(std::uint64_t offset, std::size_t length, char* out) const override {
    if (offset > bytes_.size() || length > bytes_.size() - offset) {
      throw ArchiveFormatError("read past end of archive");
    }
    std::memcpy(out, bytes_.data() + offset, length);
  }

 private:
  std::string bytes_;
};

class FileSource final : public ByteSource {
 public:
  explicit FileSource(const std::filesystem::path& path) : path_(path.string()) {
    fd_ = ::open(path_.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) throw IoError("cannot open " + path_);
    const off_t end = ::lseek(fd_, 0, SEEK_END);
    if (end < 0) {
      ::close(fd_);
      throw IoError("cannot seek " + path_);
    }
    size_ = static_cast<std::uint64_t>(end);
  }
  ~FileSource() override { ::close(fd_); }
  FileSource(const FileSource&) = delete;
  FileSource& operator=(const FileSource&) = delete;

  std::uint64_t size() const override { return size_; }
  void read_at(std::uint64_t offset, std::size_t length, char* out) const override {
    if (offset > size_ || length > size_ - offset) {
      throw ArchiveFormatError("read past end of archive");
    }
    std::size_t done = 0;
    while (done < length) {
      const ssize_t n = ::pread(fd_, out + done, length - done, static_cast<off_t>(offset + done));
      if (n <= 0) throw IoError("cannot read " + path_);
      done += static_cast<std::size_t>(n);
    }
  }

 private:
  std::string path_;
  int fd_ = -1;
  std::uint64_t size_ = 0;
};

std::string read_block(const ByteSource& src, std::uint64_t offset, std::size_t length) {
  std::string buf(length, '\0');
  src.read_at(offset, length, buf.data());
  return buf;
}

std::string inflate_raw(std::string_view compressed, std::uint64_t expected_size) {
  std::string out(expected_size, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ArchiveFormatError("zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  // A zero-length output buffer reports Z_BUF_ERROR even when the stream is
  // complete; probe with one spare byte to distinguish.
  if (rc == Z_BUF_ERROR && zs.avail_out == 0) {
    char spare;
    zs.next_out = reinterpret_cast<Bytef*>(&spare);
    zs.avail_out = 1;
    rc = inflate(&zs, Z_FINISH);
    if (rc == Z_STREAM_END && zs.avail_out == 0) rc = Z_DATA_ERROR;
  }
  const uLong produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected_size) {
    throw ArchiveFormatError("corrupt deflate stream");
  }
  return out;
}

std::string deflate_raw(std::string_view data) {
  z_stream zs{};
  if (deflateInit2(&zs, 6, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("zlib init failed");
  }
  std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("deflate failed");
  return out;
}

}  // namespace

std::uint32_t crc32_of(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib's length parameter is 32-bit; feed large buffers in chunks.
  while (!data.empty()) {
    const std::size_t n = std::min<std::size_t>(data.size(), 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(n));
    data.remove_prefix(n);
  }
  return static_cast<std::uint32_t>(crc);
}

std::unique_ptr<ByteSource> memory_source(std::string bytes) {
  return std::make_unique<MemorySource>(std::move(bytes));
}

std::unique_ptr<ByteSource> file_source(const std::filesystem::path& path) {
  return std::make_unique<FileSource>(path);
}

ZipArchive ZipArchive::open_file(const std::filesystem::path& path) {
  return ZipArchive(file_source(path));
}

ZipArchive ZipArchive::from_bytes(std::string bytes) {
  return ZipArchive(memory_source(std::move(bytes)));
}

ZipArchive::ZipArchive(std::unique_ptr<ByteSource> source) : source_(std::move(source)) {
  const std::uint64_t size = source_->size();
  if (size < 22) throw ArchiveFormatError("too small to be a zip archive");

  // The end-of-central-directory record sits within the last 64 KiB + 22 bytes.
  const std::uint64_t tail_len = std::min<std::uint64_t>(size, 65535 + 22);
  const std::string tail = read_block(*source_, size - tail_len, tail_len);
  std::size_t eocd = std::string::npos;
  for (std::size_t i = tail.size() - 22 + 1; i-- > 0;) {
    if (le32(tail.data() + i) == kEndOfCentralDirSig) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) throw ArchiveFormatError("end of central directory not found");
  const char* e = tail.data() + eocd;
  std::uint64_t total_entries = le16(e + 10);
  std::uint64_t cd_size = le32(e + 12);
  std::uint64_t cd_offset = le32(e + 16);

  const std::uint64_t eocd_abs = size - tail_len + eocd;
  if (eocd_abs >= 20) {
    const std::string loc = read_block(*source_, eocd_abs - 20, 20);
    if (le32(loc.data()) == kZip64LocatorSig) {
      const std::uint64_t z64_offset = le64(loc.data() + 8);
      const std::string z64 = read_block(*source_, z64_offset, 56);
      if (le32(z64.data()) != kZip64EndSig) throw ArchiveFormatError("bad zip64 end record");
      total_entries = le64(z64.data() + 32);
      cd_size = le64(z64.data() + 40);
      cd_offset = le64(z64.data() + 48);
    }
  }
  if (cd_offset > size || cd_size > size - cd_offset) {
    throw ArchiveFormatError("central directory out of bounds");
  }
  // Each central header takes at least 46 bytes.
  if (total_entries > cd_size / 46) throw ArchiveFormatError("entry count exceeds directory size");

  const std::string cd = read_block(*source_, cd_offset, static_cast<std::size_t>(cd_size));
  std::size_t pos = 0;
  entries_.reserve(static_cast<std::size_t>(total_entries));
  for (std::uint64_t i = 0; i < total_entries; ++i) {
    if (pos + 46 > cd.size() || le32(cd.data() + pos) != kCentralHeaderSig) {
      throw ArchiveFormatError("bad central directory header");
    }
    const char* h = cd.data() + pos;
    ZipEntry entry;
    entry.flags = le16(h + 8);
    entry.method = le16(h + 10);
    entry.crc32 = le32(h + 16);
    entry.compressed_size = le32(h + 20);
    entry.uncompressed_size = le32(h + 24);
    const std::uint16_t name_len = le16(h + 28);
    const std::uint16_t extra_len = le16(h + 30);
    const std::uint16_t comment_len = le16(h + 32);
    entry.local_header_offset = le32(h + 42);
    if (pos + 46 + name_len + extra_len + comment_len > cd.size()) {
      throw ArchiveFormatError("central directory header overruns directory");
    }
    const std::string_view raw_name(h + 46, name_len);
    entry.name = (entry.flags & kFlagUtf8) ? sanitize_utf8(raw_name) : cp437_to_utf8(raw_name);

    // Zip64 extended information: present only for saturated fields, in order.
    const char* extra = h + 46 + name_len;
    std::size_t xp = 0;
    while (xp + 4 <= extra_len) {
      const std::uint16_t id = le16(extra + xp);
      const std::uint16_t len = le16(extra + xp + 2);
      if (xp + 4 + len > extra_len) break;
      if (id == 0x0001) {
        const char* v = extra + xp + 4;
        std::size_t vp = 0;
        auto take = [&](std::uint64_t& field) {
          if (vp + 8 > len) throw ArchiveFormatError("truncated zip64 extra field");
          field = le64(v + vp);
          vp += 8;
        };
        if (entry.uncompressed_size == 0xffffffffu) take(entry.uncompressed_size);
        if (entry.compressed_size == 0xffffffffu) take(entry.compressed_size);
        if (entry.local_header_offset == 0xffffffffu) take(entry.local_header_offset);
      }
      xp += 4 + len;
    }
    pos += 46 + name_len + extra_len + comment_len;
    entries_.push_back(std::move(entry));
  }
}

std::string ZipArchive::read(const ZipEntry& entry) const {
  if (entry.flags & kFlagEncrypted) throw ArchiveFormatError(entry.name + ": encrypted entry");
  const std::string local = read_block(*source_, entry.local_header_offset, 30);
  if (le32(local.data()) != kLocalHeaderSig) {
    throw ArchiveFormatError(entry.name + ": bad local header");
  }
  const std::uint64_t data_offset =
      entry.local_header_offset + 30 + le16(local.data() + 26) + le16(local.data() + 28);
  if (data_offset > source_->size() || entry.compressed_size > source_->size() - data_offset) {
    throw ArchiveFormatError(entry.name + ": entry data out of bounds");
  }
  std::string raw = read_block(*source_, data_offset, static_cast<std::size_t>(entry.compressed_size));
  std::string data;
  if (entry.method == kMethodStored) {
    if (entry.compressed_size != entry.uncompressed_size) {
      throw ArchiveFormatError(entry.name + ": stored entry size mismatch");
    }
    data = std::move(raw);
  } else if (entry.method == kMethodDeflate) {
    // Deflate cannot expand beyond roughly 1032:1; larger claims are corrupt.
    if (entry.uncompressed_size > entry.compressed_size * 1032 + 64) {
      throw ArchiveFormatError(entry.name + ": implausible uncompressed size");
    }
    try {
      data = inflate_raw(raw, entry.uncompressed_size);
    } catch (const ArchiveFormatError& err) {
      throw ArchiveFormatError(entry.name + ": " + err.what());
    }
  } else {
    throw ArchiveFormatError(entry.name + ": unsupported compression method " +
                             std::to_string(entry.method));
  }
  if (crc32_of(data) != entry.crc32) throw ArchiveFormatError(entry.name + ": CRC mismatch");
  return data;
}

void ZipWriter::add(std::string name, std::string_view data, bool compress) {
  Pending p;
  p.crc32 = crc32_of(data);
  p.uncompressed_size = data.size();
  p.offset = out_.size();
  std::string payload;
  if (compress && !data.empty()) {
    payload = deflate_raw(data);
    p.method = kMethodDeflate;
  } else {
    payload.assign(data);
    p.method = kMethodStored;
  }
  p.compressed_size = payload.size();
  if (p.offset > 0xfffffffeu || payload.size() > 0xfffffffeu) {
    throw Error("ZipWriter does not emit zip64 archives");
  }

  put32(out_, kLocalHeaderSig);
  put16(out_, 20);
  put16(out_, kFlagUtf8);
  put16(out_, p.method);
  put16(out_, kDosTime);
  put16(out_, kDosDate);
  put32(out_, p.crc32);
  put32(out_, static_cast<std::uint32_t>(p.compressed_size));
  put32(out_, static_cast<std::uint32_t>(p.uncompressed_size));
  put16(out_, static_cast<std::uint16_t>(name.size()));
  put16(out_, 0);
  out_ += name;
  out_ += payload;
  p.name = std::move(name);
  central_.push_back(std::move(p));
}

std::string ZipWriter::finish() {
  const std::uint64_t cd_offset = out_.size();
  for (const auto& p : central_) {
    put32(out_, kCentralHeaderSig);
    put16(out_, 20);
    put16(out_, 20);
    put16(out_, kFlagUtf8);
    put16(out_, p.method);
    put16(out_, kDosTime);
    put16(out_, kDosDate);
    put32(out_, p.crc32);
    put32(out_, static_cast<std::uint32_t>(p.compressed_size));
    put32(out_, static_cast<std::uint32_t>(p.uncompressed_size));
    put16(out_, static_cast<std::uint16_t>(p.name.size()));
    put16(out_, 0);
    put16(out_, 0);
    put16(out_, 0);
    put16(out_, 0);
    put32(out_, 0);
    put32(out_, static_cast<std::uint32_t>(p.offset));
    out_ += p.name;
  }
  const std::uint64_t cd_size = out_.size() - cd_offset;
  put32(out_, kEndOfCentralDirSig);
  put16(out_, 0);
  put16(out_, 0);
  put16(out_, static_cast<std::uint16_t>(central_.size()));
  put16(out_, static_cast<std::uint16_t>(central_.size()));
  put32(out_, static_cast<std::uint32_t>(cd_size));
  put32(out_, static_cast<std::uint32_t>(cd_offset));
  put16(out_, 0);
  central_.clear();
  return std::move(out_);
}

}  // namespace exportscope
