#pragma once

// IEEE Std C57.91 dynamic thermal model for mineral-oil transformers.
// Hourly (ambient temperature, load ratio) in, per-interval insulation
// loss of life out. The recursion carries the previous interval's load
// ratio and end-of-interval temperature rises.

#include <cstdint>
#include <vector>

namespace xfmr::thermal {

/// Nameplate and thermal constants of the studied transformer.
struct TransformerParams {
    double rated_current_a = 934.0;      // informational; inputs are per-unit
    double loss_ratio_R = 7.43;          // load loss at rated load / no-load loss
    double exponent_m = 0.8;             // winding-rise exponent
    double exponent_n = 0.8;             // top-oil-rise exponent
    double hotspot_rise_rated_c = 17.6;  // rated hot-spot rise over top oil
    double topoil_rise_rated_c = 53.9;   // rated top-oil rise over ambient
    double topoil_time_constant_h = 6.8;
    double winding_time_constant_h = 0.0833;  // ~5 minutes
    double normal_insulation_life_h = 180000.0;
    double arrhenius_A = 9.8e-18;        // per-unit-life constant
    double arrhenius_B = 15000.0;        // aging-rate constant, kelvin

    /// Throws std::domain_error if any invariant is violated.
    void validate() const;
};

/// Thermal recursion state between intervals.
struct ThermalState {
    double load_ratio_prev = 0.0;      // K_i (previous interval's K_U)
    double topoil_rise_c = 0.0;        // rise at end of last interval
    double hotspot_rise_c = 0.0;
};

/// One interval of output: the dataset row for the learning stage.
struct LolRecord {
    std::int64_t interval_index = 0;
    double ambient_temp_c = 0.0;
    double load_ratio = 0.0;
    double hotspot_temp_c = 0.0;
    double aging_factor = 0.0;         // F_AA for the interval
    double lol_percent = 0.0;          // interval contribution to loss of life
};

struct StepOptions {
    // When true, the initial rises of an interval are the actual rises at
    // the end of the previous interval instead of the closed-form values
    // recomputed from K_i. Default follows the standard's formulas.
    bool carry_forward_rises = false;
    // run_profile initial state: rises at ultimate values for the first
    // interval's load (warm) or zero (cold).
    bool cold_start = false;
};

/// Per-unit insulation life A*exp(B/(theta_H + 273)); equals 1 at 110 C
/// with the default Arrhenius constants.
double per_unit_life(double hotspot_temp_c, const TransformerParams& p);

/// Aging acceleration factor exp(B/383 - B/(theta_H + 273)).
/// Strictly increasing in temperature, exactly 1 at 110 C.
double aging_acceleration_factor(double hotspot_temp_c, const TransformerParams& p);

/// Ultimate top-oil rise for a load ratio: dTO_R * ((K^2 R + 1)/(R + 1))^n.
double ultimate_topoil_rise(double load_ratio, const TransformerParams& p);

/// Ultimate hot-spot rise for a load ratio: dH_R * K^(2m).
double ultimate_hotspot_rise(double load_ratio, const TransformerParams& p);

/// Exponential relaxation from initial toward ultimate after `elapsed_h`
/// hours with time constant `tau_h`.
double transient_rise(double initial_c, double ultimate_c, double elapsed_h, double tau_h);

/// Advance one interval: update rises, form the hot-spot temperature,
/// compute F_AA and the interval LOL contribution.
std::pair<ThermalState, LolRecord> step_interval(const ThermalState& state,
                                                 double ambient_temp_c,
                                                 double load_ratio,
                                                 double dt_h,
                                                 const TransformerParams& p,
                                                 const StepOptions& opts = {});

/// Sequential fold of step_interval over aligned hourly ambient/load
/// series. Output length equals input length.
std::vector<LolRecord> run_profile(const std::vector<double>& ambient_temp_c,
                                   const std::vector<double>& load_ratio,
                                   double dt_h,
                                   const TransformerParams& p,
                                   const StepOptions& opts = {});

/// Time-weighted mean of the aging factors (F_EQA).
double equivalent_aging(const std::vector<LolRecord>& records, double dt_h);

/// F_EQA * t * 100 / normal insulation life.
double loss_of_life_percent(double equivalent_aging, double total_hours,
                            const TransformerParams& p);

}  // namespace xfmr::thermal
