#ifndef BACNOMA_MODEL_HPP
#define BACNOMA_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bacnoma/rng.hpp"

namespace bacnoma::model {

// Default master seed when a scenario or CLI run does not set one.
inline constexpr std::uint64_t kDefaultSeed = 0xBAC0FFEEull;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Vec2& a, const Vec2& b);

// Device placement: an explicit list of coordinates, or i.i.d. uniform draws
// from a square of the given edge length centered on the base station.
struct DevicePlacement {
  enum class Kind { Explicit, UniformSquare };
  Kind kind = Kind::UniformSquare;
  std::vector<Vec2> positions;  // Explicit only, one per device
  double edge = 5.0;            // UniformSquare only, meters
};

// Physical scenario description. Powers are stored in watts; the JSON loader
// also accepts *_dbm variants (see scenario_from_json).
struct ScenarioConfig {
  int m = 2;  // number of backscatter devices
  Vec2 bs_position{0.0, 0.0};
  Vec2 user_position{3.0, 0.0};
  DevicePlacement device_placement;
  double path_loss_exponent = 3.0;
  double alpha = 0.01;   // residual self-interference coefficient, [0, 1)
  double sigma2 = 0.0;   // noise power, watts
  double p_max = 0.0;    // transmit power budget, watts
  double r0 = 1.0;       // downlink target rate, bits per channel use
  bool fading = true;
  std::uint64_t seed = kDefaultSeed;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Squared channel gains for one draw.
struct ChannelRealization {
  double h0_sq = 0.0;          // |h_0|^2, downlink user <-> base station
  std::vector<double> h_sq;    // |h_m|^2, device <-> base station
  std::vector<double> g_sq;    // |g_m|^2, device <-> downlink user
  double hsi_sq = 1.0;         // |h_SI|^2, self-interference channel

  std::size_t device_count() const { return h_sq.size(); }
};

// Decision variables: downlink power and per-device reflection coefficients.
struct Allocation {
  double p0 = 0.0;           // watts, [0, p_max]
  std::vector<double> eta;   // dimensionless, each in [0, 1]
};

struct RateReport {
  double avg_sum_rate = 0.0;   // bits per channel use
  double inst_sum_rate = 0.0;  // bits per channel use at a given |s_0|^2
  double downlink_rate = 0.0;  // bits per channel use
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);  // throws std::domain_error for w <= 0

// SINR threshold equivalent to the downlink rate target: 2^r0 - 1.
double epsilon0(double r0);

// Draws one channel realization. Link gain = |fade|^2 * d^-nu with
// fade ~ CN(0,1) when fading is on (so |fade|^2 ~ Exp(1)), else fade = 1.
// The self-interference gain is |CN(0,1)|^2 with no path loss.
ChannelRealization sample_channels(const ScenarioConfig& config,
                                   rng::Stream& stream);

// Uplink sum rate at a given excitation power |s_0|^2. The device channel is
// traversed twice, hence |h_m|^4.
double instantaneous_sum_rate(const ChannelRealization& ch, const Allocation& a,
                              double s0_sq, double alpha, double sigma2);

// Expected uplink sum rate over |s_0|^2 ~ Exp(1), via the kernel.
double average_sum_rate(const ChannelRealization& ch, const Allocation& a,
                        double alpha, double sigma2);

// Downlink rate under reflected-signal interference (one pass per hop:
// |g_m|^2 |h_m|^2).
double downlink_rate(const ChannelRealization& ch, const Allocation& a,
                     double sigma2);

}  // namespace bacnoma::model

#endif  // BACNOMA_MODEL_HPP
