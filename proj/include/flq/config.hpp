// Run configuration: the union of drive parameters, rates, read-out
// settings, and engine knobs, with a flat INI-style file format
// ([drive] / [rates] / [readout] / [engine] sections), dotted-key
// overrides, and a lossless text round-trip for provenance echoing.
#pragma once

#include <string>

#include "flq/params.hpp"
#include "flq/readout.hpp"

namespace flq {

struct EngineConfig {
    int m_override = -1;          // fixed Floquet truncation order; < 0 = auto
    double truncation_tol = 1e-8;
    double ode_rel_tol = 1e-8;
    bool rates_angular = false;   // interpret rate entries as angular (x 2pi)
    unsigned long seed = 12345;   // for randomized validation checks
    int threads = 1;

    bool operator==(const EngineConfig&) const = default;
};

struct RunConfig {
    DriveParams drive;
    RateMatrices rates = RateMatrices::qd_typical();
    double epsilon = 0.025;
    double t_max_ns = 500.0;
    int grid = 2000;
    SpinSign target = SpinSign::Minus;
    ProbabilityModel prob_model = ProbabilityModel::Poisson;
    EngineConfig engine;

    ReadoutConfig readout_config() const;
    void validate() const;

    bool operator==(const RunConfig& other) const;
};

// Built-in default parameter set: typical InGaAs quantum-dot values with
// the dressing laser at 200 GHz Rabi / 2 THz detuning and a 0.5 GHz
// read-out laser on the z- cycling transition.
RunConfig default_run_config();

// Parses config text on top of a base config.  Unknown sections or keys,
// malformed lines, and unparsable values raise ParseError with line and
// key diagnostics; violated invariants raise ValidationError.
RunConfig parse_config_text(const std::string& text, RunConfig base = default_run_config());
RunConfig parse_config_file(const std::string& path, RunConfig base = default_run_config());

// Applies one "section.key=value" override.
void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

// Full config as parseable text; parse_config_text(format_config(c)) == c.
std::string format_config(const RunConfig& cfg);

} // namespace flq
