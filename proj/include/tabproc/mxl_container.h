// Compressed MusicXML (.mxl): a ZIP archive whose META-INF/container.xml
// names the score's root file.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tabproc {

/// True when the bytes start with a ZIP local-file signature.
bool isZipArchive(std::string_view bytes);

/// Names of all entries in the archive's central directory.
std::vector<std::string> zipEntryNames(std::string_view archive);

/// Uncompressed contents of one entry (stored or deflated). Throws
/// StructuralError when the entry is missing or corrupt.
std::string readZipEntry(std::string_view archive, std::string_view entryName);

/// Resolves META-INF/container.xml and returns the root MusicXML document.
std::string extractMusicXml(std::string_view mxlArchive);

/// Reads a .musicxml/.xml file, or unpacks a .mxl container (detected by
/// content, not extension). Throws Error("no such file") when unreadable.
std::string loadMusicXmlDocument(const std::filesystem::path& path);

}  // namespace tabproc
