#include "brwsim/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace brwsim::io {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string record_line(const est::EstimateRecord& record, const Extras& extras) {
    std::string line = "{";
    auto field = [&line](const std::string& key, const std::string& raw) {
        if (line.size() > 1) line += ',';
        line += '"';
        line += key;
        line += "\":";
        line += raw;
    };
    field("estimator", quote(est::to_string(record.estimator)));
    field("value", format_g17(record.value));
    field("stderr", format_g17(record.std_error));
    if (record.log_value) field("log_value", format_g17(*record.log_value));
    if (record.log_std_error) field("log_stderr", format_g17(*record.log_std_error));
    if (record.ess) {
        field("ess", format_g17(*record.ess));
        field("low_ess_warning", record.low_ess_warning ? "true" : "false");
    }
    field("samples", std::to_string(record.samples));
    field("d", std::to_string(record.shape.d));
    field("n", std::to_string(record.shape.n));
    field("seed", std::to_string(record.seed));
    field("shards", std::to_string(record.shards));
    for (const auto& [key, raw] : extras) field(key, raw);
    line += '}';
    return line;
}

std::map<std::string, std::string> load_config(const std::string& path,
                                               const std::vector<std::string>& valid_keys) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");

    auto trim = [](std::string s) {
        const auto from = s.find_first_not_of(" \t\r");
        const auto to = s.find_last_not_of(" \t\r");
        return from == std::string::npos ? std::string{} : s.substr(from, to - from + 1);
    };

    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              ": expected key=value, got '" + body + "'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + ": empty key");
        if (std::find(valid_keys.begin(), valid_keys.end(), key) == valid_keys.end()) {
            std::ostringstream msg;
            msg << "config: unknown key '" << key << "'; valid keys:";
            for (const auto& k : valid_keys) msg << ' ' << k;
            throw ConfigError(msg.str());
        }
        out[key] = value;
    }
    return out;
}

}  // namespace brwsim::io
