#include "mtfs/config.hpp"

#include <fstream>

#include <json.hpp>

using nlohmann::json;

namespace mtfs {

namespace {

OpKind op_from_string(const std::string& s) {
    if (s == "lookup") return OpKind::Lookup;
    if (s == "getattr") return OpKind::GetAttr;
    if (s == "readdir") return OpKind::ReadDir;
    if (s == "open") return OpKind::Open;
    if (s == "read") return OpKind::Read;
    if (s == "write") return OpKind::Write;
    if (s == "create") return OpKind::Create;
    if (s == "unlink") return OpKind::Unlink;
    if (s == "rename") return OpKind::Rename;
    if (s == "release") return OpKind::Release;
    throw ConfigError("unknown op kind in delayed_ops: " + s);
}

std::string op_to_lower(OpKind op) {
    std::string s = to_string(op);
    for (auto& c : s) c = static_cast<char>(::tolower(c));
    return s;
}

} // namespace

std::vector<TechniqueConfig> default_techniques() {
    TechniqueConfig delay;
    delay.kind = TechniqueKind::Delay;
    delay.delay_per_op = std::chrono::milliseconds(20);

    TechniqueConfig inf;
    inf.kind = TechniqueKind::InfiniteDir;

    TechniqueConfig suffix;
    suffix.kind = TechniqueKind::Suffix;
    suffix.epoch_seed = 0x6d746673; // stable default; rotate via control plane

    return {delay, inf, suffix};
}

MountConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("parse error: ") + e.what());
    }

    if (j.value("schema", 1) != 1) {
        throw ConfigError("unsupported schema version");
    }

    MountConfig cfg;
    if (!j.contains("underlay") || !j["underlay"].is_string()) {
        throw ConfigError("missing field: underlay");
    }
    if (!j.contains("mountpoint") || !j["mountpoint"].is_string()) {
        throw ConfigError("missing field: mountpoint");
    }
    cfg.underlay_root = j["underlay"].get<std::string>();
    cfg.mountpoint = j["mountpoint"].get<std::string>();
    cfg.control_endpoint = j.value("control_socket", std::string{});
    cfg.readonly = j.value("readonly", false);
    cfg.techniques = default_techniques();

    const json techniques = j.value("techniques", json::object());
    for (auto& t : cfg.techniques) {
        switch (t.kind) {
        case TechniqueKind::Delay: {
            const json d = techniques.value("delay", json::object());
            t.active = d.value("active", false);
            t.delay_per_op = std::chrono::milliseconds(d.value("delay_ms", 20));
            if (d.contains("ops")) {
                t.delayed_ops.clear();
                for (const auto& s : d["ops"]) {
                    t.delayed_ops.insert(op_from_string(s.get<std::string>()));
                }
            }
            break;
        }
        case TechniqueKind::InfiniteDir: {
            const json d = techniques.value("inf", json::object());
            t.active = d.value("active", false);
            t.trap_name = d.value("trap_name", std::string("!"));
            t.listing_subset_fraction = d.value("listing_fraction", 1.0);
            break;
        }
        case TechniqueKind::Suffix: {
            const json d = techniques.value("suffix", json::object());
            t.active = d.value("active", false);
            t.magic_len = d.value("magic_len", 8u);
            t.epoch_seed = d.value("epoch_seed", t.epoch_seed);
            t.obfuscate_names = d.value("obfuscate_names", false);
            break;
        }
        }
        if (auto err = validate_technique_config(t)) {
            throw ConfigError("invalid technique config (" + std::string(to_string(t.kind)) +
                              "): " + *err);
        }
    }
    if (auto err = validate_mount_config(cfg)) {
        throw ConfigError("invalid mount config: " + *err);
    }
    return cfg;
}

MountConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string config_to_json(const MountConfig& cfg) {
    json j;
    j["schema"] = 1;
    j["underlay"] = cfg.underlay_root;
    j["mountpoint"] = cfg.mountpoint;
    j["control_socket"] = cfg.control_endpoint;
    j["readonly"] = cfg.readonly;
    json techniques = json::object();
    for (const auto& t : cfg.techniques) {
        switch (t.kind) {
        case TechniqueKind::Delay: {
            json ops = json::array();
            for (OpKind op : t.delayed_ops) ops.push_back(op_to_lower(op));
            techniques["delay"] = {{"active", t.active},
                                   {"delay_ms", t.delay_per_op.count()},
                                   {"ops", ops}};
            break;
        }
        case TechniqueKind::InfiniteDir:
            techniques["inf"] = {{"active", t.active},
                                 {"trap_name", t.trap_name},
                                 {"listing_fraction", t.listing_subset_fraction}};
            break;
        case TechniqueKind::Suffix:
            techniques["suffix"] = {{"active", t.active},
                                    {"magic_len", t.magic_len},
                                    {"epoch_seed", t.epoch_seed},
                                    {"obfuscate_names", t.obfuscate_names}};
            break;
        }
    }
    j["techniques"] = techniques;
    return j.dump(2);
}

} // namespace mtfs
