#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "putbond/config.hpp"

namespace putbond {

enum class Engine { Analytic, Fd, Both };

/// Command-line overrides on top of a RunConfig.
struct CommandOptions {
    double V = 10000.0;
    double t = 0.0;
    Engine engine = Engine::Analytic;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool json = false;
    bool full_sensitivity = false;
    double t_step = 0.05;  // time spacing of the (t, ...) figure sweeps
    double v_step = 40.0;  // firm-value spacing of the (V, ...) figure sweeps
};

/// Applies the seed override, if any.
RunConfig effective_config(const RunConfig& cfg, const CommandOptions& opts);

void cmd_validate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
void cmd_boundaries(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
void cmd_price(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
void cmd_duration(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
void cmd_spread(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
void cmd_config(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);

/// Known figure ids, fig4 through fig16.
std::vector<std::string> figure_ids();

/// CSV text for a figure. Throws Error(UnknownFigure).
std::string sweep_csv(const RunConfig& cfg, const std::string& figure, const CommandOptions& opts);

/// Writes <out>/<figure>.csv and reports the path. Returns the path.
std::string cmd_sweep(const RunConfig& cfg, const std::string& figure, const CommandOptions& opts, std::ostream& out);

/// Ten significant digits ("%.10g"), used in every report and CSV file.
std::string format_number(double x);

}  // namespace putbond
