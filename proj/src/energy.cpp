#include "agplan/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace agplan {

std::string to_string(Mode mode) { return mode == Mode::fly ? "fly" : "drive"; }

Mode parse_mode(const std::string& name) {
  if (name == "fly") return Mode::fly;
  if (name == "drive") return Mode::drive;
  throw ContractError("unknown mode '" + name + "'");
}

void EnergyParams::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("energy.") + name + " must be positive");
    }
  };
  positive(rho, "rho");
  positive(mass, "m");
  positive(prop_radius, "r");
  positive(prop_count, "x");
  positive(g, "g");
  positive(eta, "eta");
  positive(mu, "mu");
  positive(c_d, "c_d");
  positive(v_fly, "v_fly");
  positive(v_drive, "v_drive");
  positive(a_fly, "a_fly");
  positive(a_drive, "a_drive");
  positive(standby_energy, "standby_energy");
  if (eta > 1.0) throw ConfigError("energy.eta must be <= 1");
  if (!(e_expand_fold >= 0.0) || !(e_bodeneffekt >= 0.0)) {
    throw ConfigError("transform energies must be >= 0");
  }
}

double hover_energy(const EnergyParams& p, const Segment& seg) {
  if (seg.mode == Mode::drive) return p.standby_energy;
  const double induced = std::sqrt(1.0 / (2.0 * std::numbers::pi * p.rho)) *
                         std::pow(p.mass * p.g / p.prop_count, 1.5) *
                         (p.prop_count / p.prop_radius);
  return induced * seg.delta_d / (p.eta * p.v_fly);
}

double move_energy(const EnergyParams& p, const Segment& seg) {
  if (seg.mode == Mode::fly) {
    double climb = p.mass * p.g * seg.delta_h;
    if (p.clamp_descent) climb = std::max(0.0, climb);
    return climb + p.rho * p.a_fly * p.c_d * p.v_fly * p.v_fly * seg.delta_d / 2.0;
  }
  return p.mu * p.mass * p.g * seg.delta_d +
         p.rho * p.a_drive * p.c_d * p.v_drive * p.v_drive * seg.delta_d / 2.0;
}

double transform_energy(const EnergyParams& p) { return p.e_expand_fold + p.e_bodeneffekt; }

double segment_energy(const EnergyParams& p, const Segment& seg, bool switched) {
  double e = hover_energy(p, seg) + move_energy(p, seg);
  if (switched) e += transform_energy(p);
  return e;
}

double fly_energy_per_meter(const EnergyParams& p) {
  return hover_energy(p, {1.0, 0.0, Mode::fly}) +
         p.rho * p.a_fly * p.c_d * p.v_fly * p.v_fly / 2.0;
}

double drive_energy_per_meter(const EnergyParams& p) {
  return p.mu * p.mass * p.g + p.rho * p.a_drive * p.c_d * p.v_drive * p.v_drive / 2.0;
}

void BatterySettings::validate() const {
  if (!(q_capacity > 0.0)) throw ConfigError("battery.q must be positive");
  if (!(q_initial > 0.0) || q_initial > q_capacity) {
    throw ConfigError("battery.q0 must be in (0, battery.q]");
  }
  if (!(soc_ref >= 0.0) || !(soc_ref < 1.0)) throw ConfigError("battery.soc_ref must be in [0, 1)");
}

BatteryState::BatteryState(const BatterySettings& s)
    : q_capacity_(s.q_capacity),
      q_initial_(s.q_initial),
      soc_(s.q_initial / s.q_capacity),
      soc_ref_(s.soc_ref),
      soc_at_last_switch_(soc_) {
  s.validate();
}

void BatteryState::debit(double joules) {
  if (!(joules >= 0.0)) throw ContractError("battery debit must be >= 0");
  const double consumed = consumed_ + joules;
  const double soc = (q_initial_ - consumed) / q_capacity_;
  if (soc < 0.0) {
    throw BatteryExhaustedError("battery exhausted: debit of " + std::to_string(joules) +
                                " J leaves soc " + std::to_string(soc));
  }
  consumed_ = consumed;
  soc_ = soc;
}

BatteryState BatteryState::debited(double joules) const {
  BatteryState next = *this;
  next.debit(joules);
  return next;
}

void BatteryState::mark_takeoff() {
  soc_at_last_switch_ = soc_;
  in_flight_ = true;
}

void BatteryState::mark_landing() {
  soc_at_last_switch_ = soc_;
  in_flight_ = false;
}

double BatteryState::flight_soc_delta() const {
  if (!in_flight_) throw BatteryStateError("flight SOC delta requested while driving");
  return soc_at_last_switch_ - soc_;
}

double BatteryState::projected_flight_soc_delta(double extra) const {
  if (!in_flight_) throw BatteryStateError("flight SOC delta requested while driving");
  return soc_at_last_switch_ - projected_soc(extra);
}

}  // namespace agplan
