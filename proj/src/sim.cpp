#include "levyfit/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "levyfit/csv.hpp"
#include "levyfit/error.hpp"

namespace levyfit {

namespace {

void check_box(const std::vector<ParamSpec>& box, const Vector& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != box.size())
    fail(ErrorCategory::InvalidArgument, std::string(what) + " parameter vector has the wrong length");
  for (std::size_t i = 0; i < box.size(); ++i) {
    double x = v[static_cast<Eigen::Index>(i)];
    if (!(x >= box[i].lower && x <= box[i].upper))
      fail(ErrorCategory::InvalidArgument, "parameter '" + box[i].name + "' = " + format_double(x) +
                                               " lies outside [" + format_double(box[i].lower) + ", " +
                                               format_double(box[i].upper) + "]");
  }
}

}  // namespace

SimOutput euler_simulate(const SdeModel& model, const TrueParams& params, const SamplingScheme& scheme,
                         const Vector& x0, std::uint64_t seed, const LawPtr& law_override) {
  scheme.validate();
  check_box(model.gamma_box(), params.gamma, "scale");
  check_box(model.alpha_box(), params.alpha, "drift");
  const LawPtr& law = law_override ? law_override : model.law();
  const std::size_t d = model.dim();
  if (law->dim() != d) fail(ErrorCategory::InvalidArgument, "noise law dimension does not match the model");
  if (!law_override && !model.eta_box().empty()) check_box(model.eta_box(), params.eta, "noise");
  law->validate(params.eta);
  if (static_cast<std::size_t>(x0.size()) != d) fail(ErrorCategory::InvalidArgument, "x0 must have one entry per state");

  const std::size_t n = scheme.n;
  const double h = scheme.step();
  RngStream rng(seed);
  SimOutput out;
  out.seed = seed;
  out.noise_increments = law->sample(n, h, params.eta, rng);

  RowMatrix values(n + 1, d);
  values.row(0) = x0.transpose();
  std::vector<double> slots = model.slots(params.gamma, params.alpha);
  std::vector<double> a(d), c(d * d);
  for (std::size_t j = 1; j <= n; ++j) {
    slots[0] = scheme.t0 + static_cast<double>(j - 1) * h;
    for (std::size_t k = 0; k < d; ++k) slots[model.table()->state_slot(k)] = values(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k));
    try {
      model.eval_drift(slots.data(), a.data());
      model.eval_scale(slots.data(), c.data());
    } catch (const Error& e) {
      fail(e.category(), "simulation step " + std::to_string(j) + ": " + e.what());
    }
    for (std::size_t k = 0; k < d; ++k) {
      double x = values(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k)) + a[k] * h;
      for (std::size_t l = 0; l < d; ++l) x += c[k * d + l] * out.noise_increments(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(l));
      if (!std::isfinite(x)) fail(ErrorCategory::Numeric, "simulation reached a non-finite state at step " + std::to_string(j));
      values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = x;
    }
  }
  out.dataset = make_dataset(std::move(values), h, scheme.t0, model.spec().state_vars);
  return out;
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t index) {
  return RngStream(master_seed).split(index).key();
}

std::vector<SimOutput> simulate_batch(const SdeModel& model, const TrueParams& params, const SamplingScheme& scheme,
                                      const Vector& x0, std::uint64_t master_seed, std::size_t reps, unsigned threads) {
  if (reps < 1) fail(ErrorCategory::InvalidArgument, "reps must be at least 1");
  std::vector<SimOutput> out(reps);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::size_t first_index = reps;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= reps) return;
      try {
        out[i] = euler_simulate(model, params, scheme, x0, replicate_seed(master_seed, i));
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (i < first_index) {
          first_index = i;
          first_error = std::make_exception_ptr(Error(e.category(), "replicate " + std::to_string(i) + ": " + e.what()));
        }
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

std::string noise_to_csv(const SimOutput& sim) {
  const auto& inc = sim.noise_increments;
  std::string out = "j,t_j";
  for (Eigen::Index l = 0; l < inc.cols(); ++l) out += ",dJ_" + std::to_string(l + 1);
  out += '\n';
  for (Eigen::Index j = 0; j < inc.rows(); ++j) {
    out += std::to_string(j + 1) + "," + format_double(sim.dataset.times[static_cast<std::size_t>(j + 1)]);
    for (Eigen::Index l = 0; l < inc.cols(); ++l) out += "," + format_double(inc(j, l));
    out += '\n';
  }
  return out;
}

}  // namespace levyfit
