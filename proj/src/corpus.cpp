#include "mtfs/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace fs = std::filesystem;

namespace mtfs {

namespace {

std::string random_payload(std::mt19937_64& rng, FileType type, std::uint64_t size) {
    std::string out = magic_prefix(type);
    if (out.size() > size) out.resize(size);
    out.reserve(size);
    if (type == FileType::Text) {
        static const char words[] =
            "sensor reading log entry report batch window sample value node frame ";
        std::uniform_int_distribution<std::size_t> pick(0, sizeof(words) - 2);
        while (out.size() < size) out += words[pick(rng)];
    } else {
        std::uniform_int_distribution<int> byte(0, 255);
        while (out.size() < size) out += static_cast<char>(byte(rng));
    }
    return out;
}

} // namespace

CorpusSummary generate_corpus(const CorpusSpec& spec, const std::string& out_dir) {
    fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw std::runtime_error("cannot create corpus dir: " + out_dir);
    for (const auto& de : fs::directory_iterator(root)) {
        (void)de;
        throw std::runtime_error("corpus dir is not empty: " + out_dir);
    }

    std::vector<std::pair<FileType, double>> mix(spec.type_mix.begin(), spec.type_mix.end());
    if (mix.empty()) throw std::runtime_error("type_mix must not be empty");
    std::vector<double> weights;
    for (const auto& [t, w] : mix) weights.push_back(w);

    std::mt19937_64 rng(spec.seed);
    std::discrete_distribution<std::size_t> pick_type(weights.begin(), weights.end());
    std::uniform_int_distribution<std::uint64_t> pick_size(spec.min_size, spec.max_size);

    for (std::uint32_t d = 0; d < spec.dirs; ++d) {
        char name[16];
        std::snprintf(name, sizeof(name), "dir%03u", d);
        fs::create_directory(root / name);
    }

    CorpusSummary summary;
    for (std::uint64_t i = 0; i < spec.file_count; ++i) {
        FileType type = mix[pick_type(rng)].first;
        std::uint64_t size = pick_size(rng);
        std::string content = random_payload(rng, type, size);

        char name[64];
        std::snprintf(name, sizeof(name), "file%05llu.%s", static_cast<unsigned long long>(i),
                      extension_for(type).c_str());
        fs::path dir = root;
        if (spec.dirs > 0) {
            char dname[16];
            std::snprintf(dname, sizeof(dname), "dir%03u",
                          static_cast<std::uint32_t>(i % spec.dirs));
            dir /= dname;
        }
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write corpus file");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        summary.files++;
        summary.total_bytes += content.size();
        summary.per_type[type]++;
    }
    return summary;
}

} // namespace mtfs
