#include "bacnoma/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bacnoma/specfun.hpp"

namespace bacnoma::model {

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) {
    throw std::domain_error("watts_to_dbm: power must be positive");
  }
  return 10.0 * std::log10(watts * 1e3);
}

double epsilon0(double r0) { return std::exp2(r0) - 1.0; }

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(m >= 1, "ScenarioConfig: M must be at least 1");
  require(std::isfinite(path_loss_exponent) && path_loss_exponent > 0.0,
          "ScenarioConfig: path_loss_exponent must be positive");
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0,
          "ScenarioConfig: alpha must lie in [0, 1)");
  require(std::isfinite(sigma2) && sigma2 > 0.0,
          "ScenarioConfig: sigma2 must be positive");
  require(std::isfinite(p_max) && p_max > 0.0,
          "ScenarioConfig: p_max must be positive");
  require(std::isfinite(r0) && r0 > 0.0, "ScenarioConfig: r0 must be positive");
  if (device_placement.kind == DevicePlacement::Kind::Explicit) {
    require(device_placement.positions.size() == static_cast<std::size_t>(m),
            "ScenarioConfig: device_placement must list one position per device");
  } else {
    require(std::isfinite(device_placement.edge) && device_placement.edge > 0.0,
            "ScenarioConfig: device_placement edge must be positive");
  }
}

namespace {

double link_gain(double dist, double nu, double fade_sq) {
  return fade_sq * std::pow(dist, -nu);
}

}  // namespace

ChannelRealization sample_channels(const ScenarioConfig& config,
                                   rng::Stream& stream) {
  config.validate();
  const double nu = config.path_loss_exponent;
  const bool fading = config.fading;
  const auto fade_sq = [&]() { return fading ? stream.exponential() : 1.0; };

  ChannelRealization ch;
  const double d0 = distance(config.bs_position, config.user_position);
  if (d0 <= 0.0) {
    throw std::invalid_argument(
        "sample_channels: user must not sit on the base station");
  }
  // Draw order is fixed: downlink fade, then per device position and fades,
  // then the self-interference fade. Changing it changes every study.
  ch.h0_sq = link_gain(d0, nu, fade_sq());

  ch.h_sq.resize(static_cast<std::size_t>(config.m));
  ch.g_sq.resize(static_cast<std::size_t>(config.m));
  const auto& placement = config.device_placement;
  for (int i = 0; i < config.m; ++i) {
    Vec2 pos;
    if (placement.kind == DevicePlacement::Kind::Explicit) {
      pos = placement.positions[static_cast<std::size_t>(i)];
      if (distance(pos, config.bs_position) <= 0.0 ||
          distance(pos, config.user_position) <= 0.0) {
        throw std::invalid_argument(
            "sample_channels: explicit device position coincides with a node");
      }
    } else {
      const double half = placement.edge / 2.0;
      do {
        pos.x = config.bs_position.x + stream.uniform(-half, half);
        pos.y = config.bs_position.y + stream.uniform(-half, half);
      } while (distance(pos, config.bs_position) <= 0.0 ||
               distance(pos, config.user_position) <= 0.0);
    }
    const double db = distance(pos, config.bs_position);
    const double du = distance(pos, config.user_position);
    ch.h_sq[static_cast<std::size_t>(i)] = link_gain(db, nu, fade_sq());
    ch.g_sq[static_cast<std::size_t>(i)] = link_gain(du, nu, fade_sq());
  }
  ch.hsi_sq = fading ? stream.exponential() : 1.0;
  return ch;
}

namespace {

// Effective uplink SNR slope: sum_m eta_m P0 |h_m|^4 over the residual
// self-interference plus noise. The backscatter link passes |h_m|^2 twice.
double uplink_ratio(const ChannelRealization& ch, const Allocation& a,
                    double alpha, double sigma2) {
  double num = 0.0;
  for (std::size_t i = 0; i < ch.h_sq.size(); ++i) {
    num += a.eta[i] * ch.h_sq[i] * ch.h_sq[i];
  }
  num *= a.p0;
  return num / (alpha * a.p0 * ch.hsi_sq + sigma2);
}

}  // namespace

double instantaneous_sum_rate(const ChannelRealization& ch, const Allocation& a,
                              double s0_sq, double alpha, double sigma2) {
  return std::log2(1.0 + uplink_ratio(ch, a, alpha, sigma2) * s0_sq);
}

double average_sum_rate(const ChannelRealization& ch, const Allocation& a,
                        double alpha, double sigma2) {
  const double x = uplink_ratio(ch, a, alpha, sigma2);
  return specfun::avg_rate_kernel(x) / std::numbers::ln2;
}

double downlink_rate(const ChannelRealization& ch, const Allocation& a,
                     double sigma2) {
  double interference = 0.0;
  for (std::size_t i = 0; i < ch.g_sq.size(); ++i) {
    interference += a.eta[i] * ch.g_sq[i] * ch.h_sq[i];
  }
  interference *= a.p0;
  return std::log2(1.0 + a.p0 * ch.h0_sq / (interference + sigma2));
}

}  // namespace bacnoma::model
