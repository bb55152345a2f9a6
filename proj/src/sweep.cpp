#include <cmath>
#include <sstream>

#include "blgi/errors.hpp"
#include "blgi/protocol.hpp"

namespace blgi {

namespace {

std::string describe(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

template <typename Spec>
Spec& require_meter(WeakMeterSpec& meter, SweepAxis axis) {
  auto* spec = std::get_if<Spec>(&meter);
  if (!spec) {
    throw InvalidArgument("sweep axis '" + to_string(axis) +
                          "' does not apply to the configured meter type");
  }
  return *spec;
}

}  // namespace

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "sigma") return SweepAxis::sigma;
  if (name == "eta") return SweepAxis::eta;
  if (name == "v") return SweepAxis::v;
  if (name == "v_total" || name == "v-total") return SweepAxis::v_total;
  if (name == "u") return SweepAxis::u;
  throw InvalidArgument("unknown sweep axis '" + name + "' (expected sigma, eta, v, v_total, u)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::sigma: return "sigma";
    case SweepAxis::eta: return "eta";
    case SweepAxis::v: return "v";
    case SweepAxis::v_total: return "v_total";
    case SweepAxis::u: return "u";
  }
  return "?";
}

ExperimentConfig with_axis_value(const ExperimentConfig& config, SweepAxis axis, double value) {
  ExperimentConfig out = config;
  for (WeakMeterSpec* meter : {&out.meter1, &out.meter2}) {
    switch (axis) {
      case SweepAxis::sigma: require_meter<GaussianMeterSpec>(*meter, axis).sigma = value; break;
      case SweepAxis::eta: require_meter<GaussianMeterSpec>(*meter, axis).eta = value; break;
      case SweepAxis::v_total: require_meter<AncillaMeterSpec>(*meter, axis).v_total = value; break;
      case SweepAxis::u: require_meter<AncillaMeterSpec>(*meter, axis).u = value; break;
      case SweepAxis::v: break;
    }
  }
  if (axis == SweepAxis::v) out.b_spec.v = value;
  try {
    out.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("invalid " + to_string(axis) + " value " + describe(value) + ": " +
                          e.what());
  }
  return out;
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, SweepAxis axis,
                            const std::vector<double>& values, SweepOptions options) {
  std::vector<ExperimentConfig> configs;
  configs.reserve(values.size());
  for (double value : values) configs.push_back(with_axis_value(config, axis, value));

  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepRow row;
    row.value = values[i];
    if (options.monte_carlo) row.mc = monte_carlo(configs[i], options.run);
    row.exact = exact_mean(configs[i]);
    row.analytic = analytic_mean(configs[i]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace blgi
