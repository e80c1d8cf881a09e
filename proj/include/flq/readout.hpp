// Spin read-out experiment layer: emission rate, detected-photon counts,
// detection probability, fidelity curve, optimal-window search, and the
// sweep drivers behind the fig2..fig5 subcommands.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flq/floquet.hpp"
#include "flq/hamiltonian.hpp"
#include "flq/liouville.hpp"
#include "flq/params.hpp"

namespace flq {

enum class ProbabilityModel { Poisson, CappedLinear };

struct ReadoutConfig {
    DriveParams drive;
    RateMatrices rates = RateMatrices::qd_typical();
    double epsilon = 0.025;  // overall detection efficiency, [0,1]
    double t_max_ns = 500.0;
    int grid = 2000;         // number of sample times, >= 16
    SpinSign target = SpinSign::Minus; // which cycling transition is driven
    ProbabilityModel prob_model = ProbabilityModel::Poisson;
    int m_override = -1;     // fixed truncation order; < 0 selects automatically
    double truncation_tol = 1e-8;

    void validate() const;
};

struct ReadoutResult {
    std::vector<double> times;           // ns
    std::vector<double> r_minus, r_plus; // emission rates, ns^-1
    std::vector<double> d_minus, d_plus; // mean detected photons up to each time
    std::vector<double> fidelity_curve;  // F(T) on the grid
    double t_star = 0.0;                 // optimal window, ns
    double f_star = 0.0;
    double d_star = 0.0;                 // mean photons from the addressed state at t_star
    int m_used = 0;                      // truncation order actually used
    double delta2_ghz = 0.0;             // resolved read-out detuning
};

// R = Gamma_31 rho_33 + Gamma_42 rho_44 (ns^-1).
double emission_rate(const DensityMatrix& rho, const RateMatrices& rates);

// epsilon * integral of the sampled rate from 0 to t, composite trapezoid
// with linear interpolation at t.  Throws OutOfRange for t outside the
// sampled interval.
double detected_photons(std::span<const double> times, std::span<const double> rate,
                        double epsilon, double t);

// Probability of detecting at least one photon given mean count d.
double detection_probability(double d, ProbabilityModel model = ProbabilityModel::Poisson);

// F = (1 - p_plus + p_minus) / 2.
double fidelity(double p_plus, double p_minus);

ReadoutResult run_readout(const ReadoutConfig& cfg);

// Column-labeled dataset for CSV emission.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Comma-separated rendering: header row, 17 significant digits, LF line
// endings.  Byte-stable for identical inputs.
std::string to_csv(const Table& t);

// Eigenfrequency splittings vs magnetic field in the undressed limit
// (analytic x-projection states).  Electron energies absolute, trion
// energies relative to the zero-field resonance.
Table fig2_zeeman(DriveParams p, double bx_max_tesla = 0.5, int points = 101);

// Eigenfrequency shifts vs dressing strength at zero field (analytic
// dressed states), same column convention.
Table fig2_acstark(DriveParams p, double omega_max_ghz = 200.0, int points = 101);

// Numerical eigenfrequencies: first vs field at zero dressing, then vs
// dressing at fixed field.  Traces are ordered by manifold and eigenvalue.
Table fig3_bfield(DriveParams p, double bx_max_tesla = 0.1, int points = 101);
Table fig3_rabi(DriveParams p, double omega_max_ghz = 200.0, int points = 101);

// Branching ratio vs dressing strength.
Table fig4(DriveParams p, double omega_max_ghz = 200.0, int points = 101);

// Full read-out run: time series of rates, counts, and fidelity.
Table fig5(const ReadoutConfig& cfg, ReadoutResult* result_out = nullptr);

// Runs readout + branching ratio while varying one parameter; used by the
// sweep subcommand.  Rows: (value, r_B, F*, T*, D*).  Grid points are
// independent and evaluated concurrently when threads > 1; results are
// ordered by index, independent of schedule.
using ParamSetter = std::function<void(ReadoutConfig&, double)>;
Table sweep_readout(const ReadoutConfig& base, const std::string& param_label,
                    const ParamSetter& set, double from, double to, int points,
                    int threads = 1);

} // namespace flq
