#pragma once

#include <string>

#include "agplan/errors.hpp"

namespace agplan {

enum class Mode { drive, fly };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name);

/// Physical constants of the energy model. Defaults are the platform values
/// (39.5 kg hexacopter, 0.4191 m propellers); the transform energies have no
/// measured value and default to 500 J + 300 J.
struct EnergyParams {
  double rho = 1.2;             // air density, kg/m^3
  double mass = 39.5;           // kg
  double prop_radius = 0.4191;  // m
  double prop_count = 6.0;
  double g = 9.81;              // m/s^2
  double eta = 0.58;            // motor efficiency
  double mu = 0.06;             // ground friction coefficient
  double c_d = 1.5;             // drag coefficient
  double v_fly = 2.0;           // m/s
  double v_drive = 1.0;         // m/s
  double a_fly = 0.6;           // windward area in flight, m^2
  double a_drive = 0.05;        // windward area on the ground, m^2
  double standby_energy = 100.0;  // J per drive segment
  double e_expand_fold = 500.0;   // J per transform
  double e_bodeneffekt = 300.0;   // J per transform (ground effect)
  // Descent cannot be recuperated: the potential term of fly-mode move
  // energy is clamped at zero unless this is switched off.
  bool clamp_descent = true;

  /// Throws ConfigError on non-positive constants or eta > 1.
  void validate() const;
};

struct Segment {
  double delta_d = 0.0;  // 3D segment length, m
  double delta_h = 0.0;  // signed altitude change, m
  Mode mode = Mode::drive;
};

double hover_energy(const EnergyParams& p, const Segment& seg);
double move_energy(const EnergyParams& p, const Segment& seg);
double transform_energy(const EnergyParams& p);
double segment_energy(const EnergyParams& p, const Segment& seg, bool switched);

/// Joules per metre that every fly segment costs at least (hover + drag on
/// level flight). Used to scale metre-valued heuristics into energy.
double fly_energy_per_meter(const EnergyParams& p);
/// Joules per metre of drive motion (friction + drag), excluding standby.
double drive_energy_per_meter(const EnergyParams& p);

class BatteryError : public Error {
 public:
  using Error::Error;
};

class BatteryExhaustedError : public BatteryError {
 public:
  using BatteryError::BatteryError;
};

class BatteryStateError : public BatteryError {
 public:
  using BatteryError::BatteryError;
};

struct BatterySettings {
  double q_capacity = 3.6e6;  // J
  double q_initial = 3.6e6;   // J
  double soc_ref = 0.15;      // allowed SOC spend per flight episode

  void validate() const;
};

/// Single-owner SOC ledger: soc = (q_initial - consumed) / q_capacity.
class BatteryState {
 public:
  BatteryState() : BatteryState(BatterySettings{}) {}
  explicit BatteryState(const BatterySettings& s);

  double q_capacity() const { return q_capacity_; }
  double q_initial() const { return q_initial_; }
  double consumed() const { return consumed_; }
  double soc() const { return soc_; }
  double soc_ref() const { return soc_ref_; }
  double soc_at_last_switch() const { return soc_at_last_switch_; }
  bool in_flight() const { return in_flight_; }
  double remaining() const { return q_initial_ - consumed_; }

  /// Adds `joules` to the consumption. Throws ContractError for negative
  /// input and BatteryExhaustedError (state unchanged) if soc would drop
  /// below zero.
  void debit(double joules);
  [[nodiscard]] BatteryState debited(double joules) const;

  /// Records the SOC at a ground-to-air switch and enters flight.
  void mark_takeoff();
  void mark_landing();

  /// SOC spent since the last takeoff. Throws BatteryStateError on the ground.
  double flight_soc_delta() const;

  /// flight_soc_delta() after a further hypothetical spend of `extra` joules.
  double projected_flight_soc_delta(double extra) const;
  double projected_soc(double extra) const { return (remaining() - extra) / q_capacity_; }

 private:
  double q_capacity_;
  double q_initial_;
  double consumed_ = 0.0;
  double soc_;
  double soc_ref_;
  double soc_at_last_switch_;
  bool in_flight_ = false;
};

}  // namespace agplan
