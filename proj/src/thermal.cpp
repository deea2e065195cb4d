#include "xfmr/thermal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace xfmr::thermal {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::domain_error(std::string(what) + " is not finite");
    }
}

}  // namespace

void TransformerParams::validate() const {
    if (!(loss_ratio_R > 0.0)) throw std::domain_error("loss_ratio_R must be > 0");
    if (!(exponent_m >= 0.8 && exponent_m <= 1.0))
        throw std::domain_error("exponent_m must lie in [0.8, 1.0]");
    if (!(exponent_n >= 0.8 && exponent_n <= 1.0))
        throw std::domain_error("exponent_n must lie in [0.8, 1.0]");
    if (!(hotspot_rise_rated_c > 0.0)) throw std::domain_error("hotspot_rise_rated_c must be > 0");
    if (!(topoil_rise_rated_c > 0.0)) throw std::domain_error("topoil_rise_rated_c must be > 0");
    if (!(topoil_time_constant_h > 0.0)) throw std::domain_error("topoil_time_constant_h must be > 0");
    if (!(winding_time_constant_h > 0.0)) throw std::domain_error("winding_time_constant_h must be > 0");
    if (!(normal_insulation_life_h > 0.0)) throw std::domain_error("normal_insulation_life_h must be > 0");
    if (!(arrhenius_A > 0.0)) throw std::domain_error("arrhenius_A must be > 0");
    if (!(arrhenius_B >= 11350.0 && arrhenius_B <= 18000.0))
        throw std::domain_error("arrhenius_B must lie in [11350, 18000]");
}

double per_unit_life(double hotspot_temp_c, const TransformerParams& p) {
    require_finite(hotspot_temp_c, "hotspot_temp_c");
    if (!(hotspot_temp_c > -273.0)) {
        throw std::domain_error("hotspot temperature must exceed absolute zero");
    }
    return p.arrhenius_A * std::exp(p.arrhenius_B / (hotspot_temp_c + 273.0));
}

double aging_acceleration_factor(double hotspot_temp_c, const TransformerParams& p) {
    require_finite(hotspot_temp_c, "hotspot_temp_c");
    if (!(hotspot_temp_c > -273.0)) {
        throw std::domain_error("hotspot temperature must exceed absolute zero");
    }
    return std::exp(p.arrhenius_B / 383.0 - p.arrhenius_B / (hotspot_temp_c + 273.0));
}

double ultimate_topoil_rise(double load_ratio, const TransformerParams& p) {
    require_finite(load_ratio, "load_ratio");
    if (load_ratio < 0.0) throw std::domain_error("load_ratio must be >= 0");
    const double ratio = (load_ratio * load_ratio * p.loss_ratio_R + 1.0) / (p.loss_ratio_R + 1.0);
    return p.topoil_rise_rated_c * std::pow(ratio, p.exponent_n);
}

double ultimate_hotspot_rise(double load_ratio, const TransformerParams& p) {
    require_finite(load_ratio, "load_ratio");
    if (load_ratio < 0.0) throw std::domain_error("load_ratio must be >= 0");
    return p.hotspot_rise_rated_c * std::pow(load_ratio, 2.0 * p.exponent_m);
}

double transient_rise(double initial_c, double ultimate_c, double elapsed_h, double tau_h) {
    require_finite(initial_c, "initial rise");
    require_finite(ultimate_c, "ultimate rise");
    if (!(tau_h > 0.0)) throw std::domain_error("time constant must be > 0");
    if (elapsed_h < 0.0) throw std::domain_error("elapsed time must be >= 0");
    return (ultimate_c - initial_c) * (1.0 - std::exp(-elapsed_h / tau_h)) + initial_c;
}

std::pair<ThermalState, LolRecord> step_interval(const ThermalState& state,
                                                 double ambient_temp_c,
                                                 double load_ratio,
                                                 double dt_h,
                                                 const TransformerParams& p,
                                                 const StepOptions& opts) {
    require_finite(ambient_temp_c, "ambient_temp_c");
    if (!(dt_h > 0.0)) throw std::domain_error("dt must be > 0");

    double topoil_initial;
    double hotspot_initial;
    if (opts.carry_forward_rises) {
        topoil_initial = state.topoil_rise_c;
        hotspot_initial = state.hotspot_rise_c;
    } else {
        topoil_initial = ultimate_topoil_rise(state.load_ratio_prev, p);
        hotspot_initial = ultimate_hotspot_rise(state.load_ratio_prev, p);
    }
    const double topoil_ultimate = ultimate_topoil_rise(load_ratio, p);
    const double hotspot_ultimate = ultimate_hotspot_rise(load_ratio, p);

    const double topoil = transient_rise(topoil_initial, topoil_ultimate, dt_h,
                                         p.topoil_time_constant_h);
    const double hotspot = transient_rise(hotspot_initial, hotspot_ultimate, dt_h,
                                          p.winding_time_constant_h);

    const double hotspot_temp = ambient_temp_c + topoil + hotspot;
    const double faa = aging_acceleration_factor(hotspot_temp, p);

    LolRecord rec;
    rec.ambient_temp_c = ambient_temp_c;
    rec.load_ratio = load_ratio;
    rec.hotspot_temp_c = hotspot_temp;
    rec.aging_factor = faa;
    rec.lol_percent = faa * dt_h * 100.0 / p.normal_insulation_life_h;

    ThermalState next;
    next.load_ratio_prev = load_ratio;
    next.topoil_rise_c = topoil;
    next.hotspot_rise_c = hotspot;
    return {next, rec};
}

std::vector<LolRecord> run_profile(const std::vector<double>& ambient_temp_c,
                                   const std::vector<double>& load_ratio,
                                   double dt_h,
                                   const TransformerParams& p,
                                   const StepOptions& opts) {
    if (ambient_temp_c.empty()) throw std::invalid_argument("empty profile");
    if (ambient_temp_c.size() != load_ratio.size()) {
        throw std::invalid_argument("ambient and load series differ in length");
    }

    ThermalState state;
    state.load_ratio_prev = load_ratio.front();
    if (!opts.cold_start) {
        state.topoil_rise_c = ultimate_topoil_rise(load_ratio.front(), p);
        state.hotspot_rise_c = ultimate_hotspot_rise(load_ratio.front(), p);
    }

    std::vector<LolRecord> out;
    out.reserve(ambient_temp_c.size());
    for (std::size_t i = 0; i < ambient_temp_c.size(); ++i) {
        auto [next, rec] = step_interval(state, ambient_temp_c[i], load_ratio[i], dt_h, p, opts);
        rec.interval_index = static_cast<std::int64_t>(i);
        out.push_back(rec);
        state = next;
    }
    return out;
}

double equivalent_aging(const std::vector<LolRecord>& records, double dt_h) {
    if (records.empty()) throw std::invalid_argument("empty record list");
    if (!(dt_h > 0.0)) throw std::domain_error("dt must be > 0");
    double num = 0.0;
    for (const auto& r : records) num += r.aging_factor * dt_h;
    return num / (dt_h * static_cast<double>(records.size()));
}

double loss_of_life_percent(double equivalent_aging, double total_hours,
                            const TransformerParams& p) {
    if (equivalent_aging < 0.0 || total_hours < 0.0) {
        throw std::domain_error("equivalent aging and duration must be >= 0");
    }
    return equivalent_aging * total_hours * 100.0 / p.normal_insulation_life_h;
}

}  // namespace xfmr::thermal
