#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "brwsim/estimators.hpp"

namespace brwsim::io {

/// 17 significant digits: enough for exact double round-trips, so repeated
/// runs produce byte-identical payloads.
std::string format_g17(double v);

/// Extra key/value pairs appended to a record line; values are preformatted
/// JSON fragments (use format_g17 / quote).
using Extras = std::vector<std::pair<std::string, std::string>>;

std::string quote(const std::string& s);

/// One EstimateRecord as a single-line JSON object with a fixed key order.
/// Wall-clock time is deliberately not part of the payload.
std::string record_line(const est::EstimateRecord& record, const Extras& extras = {});

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value config file: one pair per line, '#' comments and blank
/// lines ignored, keys validated against valid_keys.  Malformed lines and
/// unknown keys raise ConfigError with the offending line or key named.
std::map<std::string, std::string> load_config(const std::string& path,
                                               const std::vector<std::string>& valid_keys);

}  // namespace brwsim::io
