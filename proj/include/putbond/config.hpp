#pragma once

#include <string>

#include "putbond/domain.hpp"
#include "putbond/fdoracle.hpp"
#include "putbond/mvncdf.hpp"

namespace putbond {

/// Everything a CLI run needs. Defaults reproduce the three-year basic example.
struct RunConfig {
    BondSpec bond{{1.0, 2.0, 3.0}, {40.0, 40.0, 40.0}, 1000.0};
    MarketParams market{0.03, 0.0, 1.0, 0.5};
    MvnAccuracy accuracy;
    GridSpec grid;
    std::string outputs = "out";
};

/// Parses a JSON document. `bond` and `market` must be complete; the other
/// sections are optional. Unknown or missing fields raise Error(ConfigError).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Pretty-printed JSON that parse_config maps back to the same RunConfig.
std::string emit_config(const RunConfig& cfg);

}  // namespace putbond
