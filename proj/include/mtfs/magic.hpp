#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mtfs {

// File types the simulated attackers and the corpus generator know about,
// identified by their leading signature bytes.
enum class FileType {
    Pdf,
    Png,
    Jpeg,
    Zip,
    Elf,
    Text,
};

const char* to_string(FileType t);
std::optional<FileType> file_type_from_string(const std::string& name);

// Signature emitted at the start of generated files of this type.
std::string magic_prefix(FileType t);

// Default extension used by the corpus generator.
std::string extension_for(FileType t);
std::optional<FileType> type_for_extension(const std::string& ext);

// Sniffs the first bytes the way a type-filtering attacker would. Text is
// recognized when all sampled bytes are printable ASCII or whitespace.
std::optional<FileType> detect_type(const std::string& head);

} // namespace mtfs
