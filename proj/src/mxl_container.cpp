#include "tabproc/mxl_container.h"

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "tabproc/error.h"
#include "tabproc/xml_tree.h"

namespace tabproc {

namespace {

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSig = 0x02014b50;
constexpr std::uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr std::size_t kEndOfCentralDirSize = 22;
constexpr std::size_t kCentralHeaderSize = 46;
constexpr std::size_t kLocalHeaderSize = 30;

std::uint32_t readLe(std::string_view bytes, std::size_t offset, int width) {
  if (offset + static_cast<std::size_t>(width) > bytes.size()) {
    throw StructuralError("truncated ZIP archive");
  }
  std::uint32_t value = 0;
  for (int i = width - 1; i >= 0; --i) {
    value = (value << 8) | static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(i)]);
  }
  return value;
}

struct CentralEntry {
  std::string name;
  std::uint16_t method = 0;
  std::uint32_t crc = 0;
  std::uint32_t compressedSize = 0;
  std::uint32_t uncompressedSize = 0;
  std::uint32_t localHeaderOffset = 0;
};

std::vector<CentralEntry> readCentralDirectory(std::string_view archive) {
  if (archive.size() < kEndOfCentralDirSize) throw StructuralError("not a ZIP archive");
  // The end record sits in the last 22 bytes plus an optional comment (< 64 KiB).
  std::size_t searchStart =
      archive.size() > kEndOfCentralDirSize + 0xFFFF ? archive.size() - kEndOfCentralDirSize - 0xFFFF : 0;
  std::size_t eocd = std::string_view::npos;
  for (std::size_t pos = archive.size() - kEndOfCentralDirSize + 1; pos-- > searchStart;) {
    if (readLe(archive, pos, 4) == kEndOfCentralDirSig) {
      eocd = pos;
      break;
    }
  }
  if (eocd == std::string_view::npos) throw StructuralError("ZIP end of central directory not found");

  std::uint32_t count = readLe(archive, eocd + 10, 2);
  std::size_t offset = readLe(archive, eocd + 16, 4);
  std::vector<CentralEntry> entries;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (readLe(archive, offset, 4) != kCentralHeaderSig) throw StructuralError("corrupt ZIP central directory");
    CentralEntry e;
    e.method = static_cast<std::uint16_t>(readLe(archive, offset + 10, 2));
    e.crc = readLe(archive, offset + 16, 4);
    e.compressedSize = readLe(archive, offset + 20, 4);
    e.uncompressedSize = readLe(archive, offset + 24, 4);
    std::size_t nameLen = readLe(archive, offset + 28, 2);
    std::size_t extraLen = readLe(archive, offset + 30, 2);
    std::size_t commentLen = readLe(archive, offset + 32, 2);
    e.localHeaderOffset = readLe(archive, offset + 42, 4);
    if (offset + kCentralHeaderSize + nameLen > archive.size()) throw StructuralError("truncated ZIP archive");
    e.name = std::string(archive.substr(offset + kCentralHeaderSize, nameLen));
    entries.push_back(std::move(e));
    offset += kCentralHeaderSize + nameLen + extraLen + commentLen;
  }
  return entries;
}

std::string inflateRaw(std::string_view compressed, std::size_t expectedSize) {
  std::string out(expectedSize, '\0');
  z_stream stream{};
  if (inflateInit2(&stream, -MAX_WBITS) != Z_OK) throw Error("zlib initialisation failed");
  stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  stream.avail_in = static_cast<uInt>(compressed.size());
  stream.next_out = reinterpret_cast<Bytef*>(out.data());
  stream.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&stream, Z_FINISH);
  std::size_t produced = stream.total_out;
  inflateEnd(&stream);
  if (rc != Z_STREAM_END || produced != expectedSize) throw StructuralError("corrupt deflate stream in ZIP entry");
  return out;
}

}  // namespace

bool isZipArchive(std::string_view bytes) {
  return bytes.size() >= 4 && readLe(bytes, 0, 4) == kLocalHeaderSig;
}

std::vector<std::string> zipEntryNames(std::string_view archive) {
  std::vector<std::string> names;
  for (auto& e : readCentralDirectory(archive)) names.push_back(std::move(e.name));
  return names;
}

std::string readZipEntry(std::string_view archive, std::string_view entryName) {
  for (const auto& e : readCentralDirectory(archive)) {
    if (e.name != entryName) continue;
    std::size_t local = e.localHeaderOffset;
    if (readLe(archive, local, 4) != kLocalHeaderSig) throw StructuralError("corrupt ZIP local header");
    std::size_t nameLen = readLe(archive, local + 26, 2);
    std::size_t extraLen = readLe(archive, local + 28, 2);
    std::size_t dataStart = local + kLocalHeaderSize + nameLen + extraLen;
    if (dataStart + e.compressedSize > archive.size()) throw StructuralError("truncated ZIP entry");
    auto data = archive.substr(dataStart, e.compressedSize);
    std::string content;
    if (e.method == 0) {
      content = std::string(data);
    } else if (e.method == 8) {
      content = inflateRaw(data, e.uncompressedSize);
    } else {
      throw StructuralError("unsupported ZIP compression method " + std::to_string(e.method));
    }
    auto crc = crc32(0L, reinterpret_cast<const Bytef*>(content.data()), static_cast<uInt>(content.size()));
    if (crc != e.crc) throw StructuralError("CRC mismatch in ZIP entry '" + e.name + "'");
    return content;
  }
  throw StructuralError("ZIP entry '" + std::string(entryName) + "' not found");
}

std::string extractMusicXml(std::string_view mxlArchive) {
  XmlElement container = parseXml(readZipEntry(mxlArchive, "META-INF/container.xml"));
  const XmlElement* rootfiles = container.child("rootfiles");
  if (rootfiles) {
    for (const XmlElement* rootfile : rootfiles->childrenNamed("rootfile")) {
      auto media = rootfile->attribute("media-type");
      // The first rootfile is the score; others may be PDFs or images.
      if (media && *media != "application/vnd.recordare.musicxml+xml") continue;
      if (auto path = rootfile->attribute("full-path")) return readZipEntry(mxlArchive, *path);
    }
  }
  throw StructuralError("container.xml names no MusicXML rootfile");
}

std::string loadMusicXmlDocument(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) throw Error(path.string() + ": no such file");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (isZipArchive(bytes)) return extractMusicXml(bytes);
  return bytes;
}

}  // namespace tabproc
