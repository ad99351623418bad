#include "mtfs/magic.hpp"

#include <algorithm>
#include <cctype>

namespace mtfs {

const char* to_string(FileType t) {
    switch (t) {
    case FileType::Pdf: return "pdf";
    case FileType::Png: return "png";
    case FileType::Jpeg: return "jpeg";
    case FileType::Zip: return "zip";
    case FileType::Elf: return "elf";
    case FileType::Text: return "text";
    }
    return "?";
}

std::optional<FileType> file_type_from_string(const std::string& name) {
    std::string low = name;
    std::transform(low.begin(), low.end(), low.begin(), ::tolower);
    if (low == "pdf") return FileType::Pdf;
    if (low == "png") return FileType::Png;
    if (low == "jpeg" || low == "jpg") return FileType::Jpeg;
    if (low == "zip") return FileType::Zip;
    if (low == "elf") return FileType::Elf;
    if (low == "text" || low == "txt") return FileType::Text;
    return std::nullopt;
}

std::string magic_prefix(FileType t) {
    switch (t) {
    case FileType::Pdf: return "%PDF-1.4";
    case FileType::Png: return std::string("\x89PNG\r\n\x1a\n", 8);
    case FileType::Jpeg: return std::string("\xff\xd8\xff\xe0", 4);
    case FileType::Zip: return std::string("PK\x03\x04", 4);
    case FileType::Elf: return std::string("\x7f" "ELF", 4);
    case FileType::Text: return "";
    }
    return "";
}

std::string extension_for(FileType t) {
    switch (t) {
    case FileType::Pdf: return "pdf";
    case FileType::Png: return "png";
    case FileType::Jpeg: return "jpg";
    case FileType::Zip: return "zip";
    case FileType::Elf: return "bin";
    case FileType::Text: return "txt";
    }
    return "dat";
}

std::optional<FileType> type_for_extension(const std::string& ext) {
    if (ext == "pdf") return FileType::Pdf;
    if (ext == "png") return FileType::Png;
    if (ext == "jpg" || ext == "jpeg") return FileType::Jpeg;
    if (ext == "zip") return FileType::Zip;
    if (ext == "bin" || ext == "elf") return FileType::Elf;
    if (ext == "txt") return FileType::Text;
    return std::nullopt;
}

std::optional<FileType> detect_type(const std::string& head) {
    for (FileType t : {FileType::Pdf, FileType::Png, FileType::Jpeg, FileType::Zip, FileType::Elf}) {
        std::string sig = magic_prefix(t);
        if (head.size() >= sig.size() && head.compare(0, sig.size(), sig) == 0) return t;
    }
    if (head.empty()) return std::nullopt;
    bool printable = std::all_of(head.begin(), head.end(), [](unsigned char c) {
        return std::isprint(c) || c == '\n' || c == '\r' || c == '\t';
    });
    if (printable) return FileType::Text;
    return std::nullopt;
}

} // namespace mtfs
