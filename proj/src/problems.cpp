#include "accel/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "accel/errors.hpp"
#include "accel/rng.hpp"

namespace accel {

static_assert(std::endian::native == std::endian::little,
              "matrix files are written in host byte order");

namespace {

// Stream identifiers; one per generated quantity.
constexpr std::uint64_t kStreamRidgeU = 1;
constexpr std::uint64_t kStreamRidgeV = 2;
constexpr std::uint64_t kStreamRidgeB = 3;
constexpr std::uint64_t kStreamBpdnA = 11;
constexpr std::uint64_t kStreamBpdnSupport = 12;
constexpr std::uint64_t kStreamBpdnNoise = 13;
constexpr std::uint64_t kStreamQuadBasis = 21;
constexpr std::uint64_t kStreamQuadRhs = 22;

constexpr int kMaxRidgeRetries = 3;

double gram_estimate(const Matrix& a, std::uint64_t seed) {
  PowerMethodOptions options;
  options.seed = seed;
  return power_method_sq_norm(
      [&a](const DenseVector& v) { return multiply(a, multiply_transpose(a, v)); },
      a.rows(), options);
}

}  // namespace

void Objective::validate() const {
  if (!value || !gradient) throw std::invalid_argument("Objective: missing callable");
  if (dim < 1) throw std::invalid_argument("Objective: dim must be >= 1");
  if (!(mu > 0.0 && mu <= lip && std::isfinite(lip))) {
    throw std::invalid_argument("Objective: need 0 < mu <= L");
  }
  if (feasible_radius && !(*feasible_radius > 0.0)) {
    throw std::invalid_argument("Objective: feasible radius must be positive");
  }
}

// ---------------------------------------------------------------------------

std::string RidgeSpec::key() const {
  std::ostringstream os;
  os.precision(17);
  os << "ridge:m=" << m << ",n=" << n << ",lambda=" << lambda << ",smax=" << sigma_max
     << ",smin=" << sigma_min << ",seed=" << seed;
  return os.str();
}

ValueGrad ridge_value_grad(const Matrix& a, const DenseVector& b, double lambda,
                           const DenseVector& x) {
  DenseVector r = multiply(a, x);
  if (r.size() != b.size()) throw DimensionError("ridge_value_grad: b length");
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  ValueGrad out;
  out.value = 0.5 * squared_norm(r) + 0.5 * lambda * squared_norm(x);
  out.grad = multiply_transpose(a, r);
  axpy(lambda, x.span(), out.grad.span());
  return out;
}

std::optional<Matrix> random_orthonormal_columns(std::size_t rows, std::size_t cols,
                                                 std::uint64_t seed,
                                                 std::uint64_t stream) {
  if (cols > rows) throw DimensionError("random_orthonormal_columns: cols > rows");
  Rng rng(seed, stream);
  Matrix q(cols, rows);
  std::vector<double> coeff(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    auto w = q.row(j);
    for (double& e : w) e = rng.normal();
    const double start_norm = norm2(w);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) coeff[i] = dot(q.row(i), w);
      for (std::size_t i = 0; i < j; ++i) axpy(-coeff[i], q.row(i), w);
    }
    const double nrm = norm2(w);
    if (!(nrm > 1e-10 * start_norm)) return std::nullopt;
    for (double& e : w) e /= nrm;
  }
  return q;
}

RidgeProblem ridge_from_data(const RidgeSpec& spec, std::uint64_t seed_used,
                             RidgeData data) {
  if (data.a.rows() != spec.m || data.a.cols() != spec.n || data.b.size() != spec.m) {
    throw DimensionError("ridge_from_data: data does not match spec");
  }
  data.lambda = spec.lambda;
  RidgeProblem p;
  p.spec = spec;
  p.seed_used = seed_used;
  p.gram_norm_estimate = gram_estimate(data.a, spec.seed);
  auto shared = std::make_shared<const RidgeData>(std::move(data));
  p.data = shared;

  Objective& obj = p.objective;
  obj.value = [shared](const DenseVector& x) {
    DenseVector r = multiply(shared->a, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= shared->b[i];
    return 0.5 * squared_norm(r) + 0.5 * shared->lambda * squared_norm(x);
  };
  obj.gradient = [shared](const DenseVector& x) {
    return ridge_value_grad(shared->a, shared->b, shared->lambda, x).grad;
  };
  obj.mu = spec.lambda;
  obj.lip = kPowerMethodInflation * p.gram_norm_estimate + spec.lambda;
  obj.dim = spec.n;
  obj.validate();
  return p;
}

RidgeProblem ridge_build(const RidgeSpec& spec) {
  if (spec.m == 0 || spec.n == 0) throw std::invalid_argument("ridge_build: empty shape");
  if (spec.m > spec.n) {
    throw std::invalid_argument("ridge_build: requires m <= n for an n x m factor V");
  }
  if (!(spec.lambda > 0.0)) throw std::invalid_argument("ridge_build: lambda must be > 0");
  if (!(spec.sigma_max >= spec.sigma_min && spec.sigma_min >= 0.0)) {
    throw std::invalid_argument("ridge_build: bad singular value range");
  }

  for (int attempt = 0; attempt <= kMaxRidgeRetries; ++attempt) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(attempt);
    auto u = random_orthonormal_columns(spec.m, spec.m, seed, kStreamRidgeU);
    if (!u) continue;
    auto v = random_orthonormal_columns(spec.n, spec.m, seed, kStreamRidgeV);
    if (!v) continue;

    std::vector<double> sigma(spec.m, spec.sigma_max);
    if (spec.m > 1) {
      const double step = (spec.sigma_max - spec.sigma_min) / static_cast<double>(spec.m - 1);
      for (std::size_t k = 0; k < spec.m; ++k) {
        sigma[k] = spec.sigma_max - step * static_cast<double>(k);
      }
      sigma.back() = spec.sigma_min;
    }

    // A = sum_k sigma_k u_k v_k^T, accumulated row by row.
    RidgeData data;
    data.a = Matrix(spec.m, spec.n);
    for (std::size_t i = 0; i < spec.m; ++i) {
      auto row = data.a.row(i);
      for (std::size_t k = 0; k < spec.m; ++k) {
        axpy((*u)(k, i) * sigma[k], v->row(k), row);
      }
    }
    Rng rng_b(seed, kStreamRidgeB);
    data.b = rng_b.normal_vector(spec.m);
    return ridge_from_data(spec, seed, std::move(data));
  }
  throw NumericalError("ridge_build: orthonormal factor degenerate after retries");
}

// ---------------------------------------------------------------------------

ValueGrad bowl_value_grad(std::size_t n, const DenseVector& x) {
  if (x.size() != n) throw DimensionError("bowl_value_grad: length mismatch");
  ValueGrad out;
  out.grad = DenseVector(n);
  double quartic = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = static_cast<double>(i + 1);
    const double t = x[i];
    const double t2 = t * t;
    quartic += weight * t2 * t2;
    out.grad[i] = 4.0 * weight * t2 * t + t;
  }
  out.value = quartic + 0.5 * squared_norm(x);
  return out;
}

Objective bowl_objective(const BowlSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("bowl_objective: n must be >= 1");
  if (!(spec.tau_ball > 0.0)) throw std::invalid_argument("bowl_objective: tau must be > 0");
  const std::size_t n = spec.n;
  Objective obj;
  obj.value = [n](const DenseVector& x) { return bowl_value_grad(n, x).value; };
  obj.gradient = [n](const DenseVector& x) { return bowl_value_grad(n, x).grad; };
  obj.mu = 1.0;
  obj.lip = 12.0 * static_cast<double>(n) * spec.tau_ball * spec.tau_ball + 1.0;
  obj.dim = n;
  obj.feasible_radius = spec.tau_ball;
  return obj;
}

DenseVector bowl_start(const BowlSpec& spec) {
  return DenseVector(spec.n, spec.tau_ball / std::sqrt(static_cast<double>(spec.n)));
}

BowlProblem bowl_build(const BowlSpec& spec) { return {spec, bowl_objective(spec)}; }

// ---------------------------------------------------------------------------

ValueGrad huber_value_grad(double tau_huber, const DenseVector& x) {
  if (!(tau_huber > 0.0)) throw std::invalid_argument("huber_value_grad: tau must be > 0");
  ValueGrad out;
  out.grad = DenseVector(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x[i];
    const double mag = std::abs(t);
    if (mag >= tau_huber) {
      total += mag - 0.5 * tau_huber;
      out.grad[i] = t > 0.0 ? 1.0 : -1.0;
    } else {
      total += t * t / (2.0 * tau_huber);
      out.grad[i] = t / tau_huber;
    }
  }
  out.value = total;
  return out;
}

std::string BpdnSpec::key() const {
  std::ostringstream os;
  os.precision(17);
  os << "bpdn:m=" << m << ",n=" << n << ",lambda=" << lambda << ",tau=" << tau_huber
     << ",sigma=" << sigma_scvx << ",nnz=" << nnz << ",noise=" << noise_level
     << ",seed=" << seed;
  return os.str();
}

ValueGrad bpdn_value_grad(const Matrix& a, const DenseVector& b, double lambda,
                          double tau_huber, double sigma_scvx, const DenseVector& x) {
  ValueGrad ls = ridge_value_grad(a, b, sigma_scvx, x);
  if (lambda != 0.0) {
    const ValueGrad h = huber_value_grad(tau_huber, x);
    ls.value += lambda * h.value;
    axpy(lambda, h.grad.span(), ls.grad.span());
  }
  return ls;
}

BpdnProblem bpdn_build(const BpdnSpec& spec) {
  if (spec.m == 0 || spec.n == 0) throw std::invalid_argument("bpdn_build: empty shape");
  if (!(spec.lambda > 0.0 && spec.tau_huber > 0.0 && spec.sigma_scvx > 0.0)) {
    throw std::invalid_argument("bpdn_build: lambda, tau and sigma must be > 0");
  }
  if (spec.nnz > spec.n) throw std::invalid_argument("bpdn_build: nnz > n");

  BpdnData data;
  data.lambda = spec.lambda;
  data.tau_huber = spec.tau_huber;
  data.sigma_scvx = spec.sigma_scvx;

  Rng rng_a(spec.seed, kStreamBpdnA);
  data.a = Matrix(spec.m, spec.n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.n));
  for (double& e : data.a.storage()) e = scale * rng_a.normal();

  // Partial Fisher-Yates for the support, then a random sign per entry.
  Rng rng_s(spec.seed, kStreamBpdnSupport);
  std::vector<std::size_t> index(spec.n);
  std::iota(index.begin(), index.end(), std::size_t{0});
  data.x_true = DenseVector(spec.n);
  for (std::size_t k = 0; k < spec.nnz; ++k) {
    const std::size_t span = spec.n - k;
    const std::size_t pick = k + static_cast<std::size_t>(rng_s.next_u64() % span);
    std::swap(index[k], index[pick]);
    data.x_true[index[k]] = rng_s.uniform() < 0.5 ? -1.0 : 1.0;
  }

  DenseVector clean = multiply(data.a, data.x_true);
  Rng rng_e(spec.seed, kStreamBpdnNoise);
  const double noise_scale =
      spec.noise_level * norm2(clean) / std::sqrt(static_cast<double>(spec.m));
  data.b = DenseVector(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) data.b[i] = clean[i] + noise_scale * rng_e.normal();

  BpdnProblem p;
  p.spec = spec;
  p.gram_norm_estimate = gram_estimate(data.a, spec.seed);
  auto shared = std::make_shared<const BpdnData>(std::move(data));
  p.data = shared;

  Objective& obj = p.objective;
  obj.value = [shared](const DenseVector& x) {
    return bpdn_value_grad(shared->a, shared->b, shared->lambda, shared->tau_huber,
                           shared->sigma_scvx, x)
        .value;
  };
  obj.gradient = [shared](const DenseVector& x) {
    return bpdn_value_grad(shared->a, shared->b, shared->lambda, shared->tau_huber,
                           shared->sigma_scvx, x)
        .grad;
  };
  obj.mu = spec.sigma_scvx;
  obj.lip = kPowerMethodInflation * p.gram_norm_estimate + spec.lambda / spec.tau_huber +
            spec.sigma_scvx;
  obj.dim = spec.n;
  obj.validate();
  return p;
}

// ---------------------------------------------------------------------------

QuadraticProblem quadratic_build(const QuadraticSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("quadratic_build: n must be >= 1");
  if (!(spec.kappa >= 1.0 && spec.mu > 0.0)) {
    throw std::invalid_argument("quadratic_build: need kappa >= 1 and mu > 0");
  }
  const std::size_t n = spec.n;
  auto basis = random_orthonormal_columns(n, n, spec.seed, kStreamQuadBasis);
  if (!basis) throw NumericalError("quadratic_build: degenerate basis");

  QuadraticData data;
  data.eigenvectors = std::move(*basis);
  data.eigenvalues = DenseVector(n, spec.mu);
  const double top = spec.mu * spec.kappa;
  for (std::size_t k = 0; k < n; ++k) {
    const double frac = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
    data.eigenvalues[k] = top * std::pow(spec.kappa, -frac);
  }
  data.eigenvalues[0] = top;
  data.eigenvalues[n - 1] = n > 1 ? spec.mu : top;

  data.q = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto qk = data.eigenvectors.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      axpy(data.eigenvalues[k] * qk[i], qk, data.q.row(i));
    }
  }
  // Symmetrize.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (data.q(i, j) + data.q(j, i));
      data.q(i, j) = avg;
      data.q(j, i) = avg;
    }
  }
  Rng rng_c(spec.seed, kStreamQuadRhs);
  data.c = rng_c.normal_vector(n);

  QuadraticProblem p;
  p.spec = spec;
  auto shared = std::make_shared<const QuadraticData>(std::move(data));
  p.data = shared;
  Objective& obj = p.objective;
  obj.value = [shared](const DenseVector& x) {
    const DenseVector qx = multiply(shared->q, x);
    return 0.5 * dot(x, qx) - dot(shared->c, x);
  };
  obj.gradient = [shared](const DenseVector& x) {
    DenseVector g = multiply(shared->q, x);
    axpy(-1.0, shared->c.span(), g.span());
    return g;
  };
  obj.mu = n > 1 ? spec.mu : top;
  obj.lip = top;
  obj.dim = n;
  obj.validate();
  return p;
}

DenseVector quadratic_minimizer(const QuadraticData& data) {
  const std::size_t n = data.c.size();
  DenseVector x(n);
  for (std::size_t k = 0; k < data.eigenvalues.size(); ++k) {
    const auto qk = data.eigenvectors.row(k);
    const double coeff = dot(qk, data.c.span()) / data.eigenvalues[k];
    axpy(coeff, qk, x.span());
  }
  return x;
}

// ---------------------------------------------------------------------------

const Objective& objective_of(const ProblemInstance& problem) {
  return std::visit([](const auto& p) -> const Objective& { return p.objective; }, problem);
}

DenseVector default_start(const ProblemInstance& problem) {
  if (const auto* bowl = std::get_if<BowlProblem>(&problem)) return bowl_start(bowl->spec);
  return DenseVector(objective_of(problem).dim);
}

std::string problem_name(const ProblemInstance& problem) {
  switch (problem.index()) {
    case 0: return "ridge";
    case 1: return "bowl";
    case 2: return "bpdn";
    default: return "quadratic";
  }
}

std::string problem_key(const ProblemInstance& problem) {
  if (const auto* p = std::get_if<RidgeProblem>(&problem)) return p->spec.key();
  if (const auto* p = std::get_if<BpdnProblem>(&problem)) return p->spec.key();
  std::ostringstream os;
  os.precision(17);
  if (const auto* p = std::get_if<BowlProblem>(&problem)) {
    os << "bowl:n=" << p->spec.n << ",tau=" << p->spec.tau_ball;
  } else {
    const auto& q = std::get<QuadraticProblem>(problem).spec;
    os << "quadratic:n=" << q.n << ",kappa=" << q.kappa << ",mu=" << q.mu << ",seed=" << q.seed;
  }
  return os.str();
}

RidgeProblem ridge_load_or_build(const RidgeSpec& spec,
                                 const std::optional<std::filesystem::path>& cache_dir) {
  if (!cache_dir) return ridge_build(spec);
  std::filesystem::create_directories(*cache_dir);
  char tag[17];
  std::snprintf(tag, sizeof tag, "%016llx",
                static_cast<unsigned long long>(fnv1a(spec.key())));
  const auto base = *cache_dir / ("ridge_" + std::string(tag));
  const auto a_path = base.string() + "_A.bin";
  const auto b_path = base.string() + "_b.bin";
  const auto meta_path = base.string() + "_seed.bin";
  if (std::filesystem::exists(a_path) && std::filesystem::exists(b_path) &&
      std::filesystem::exists(meta_path)) {
    try {
      RidgeData data;
      data.a = read_matrix(a_path);
      data.b = read_vector(b_path);
      const DenseVector meta = read_vector(meta_path);
      if (meta.size() == 1 && data.a.rows() == spec.m && data.a.cols() == spec.n) {
        return ridge_from_data(spec, static_cast<std::uint64_t>(meta[0]), std::move(data));
      }
    } catch (const std::exception&) {
      // Unreadable or mismatched cache entry; rebuild below.
    }
  }
  RidgeProblem p = ridge_build(spec);
  write_matrix(a_path, p.data->a);
  write_vector(b_path, p.data->b);
  write_vector(meta_path, DenseVector{static_cast<double>(p.seed_used)});
  return p;
}

// ---------------------------------------------------------------------------

CertifyReport scvx_lipschitz_certify(const Objective& obj, int samples,
                                     std::uint64_t seed, const CertifyOptions& options) {
  if (samples < 1) throw std::invalid_argument("scvx_lipschitz_certify: samples must be >= 1");
  obj.validate();
  const std::size_t n = obj.dim;
  Rng rng(seed, /*stream=*/0xce27);

  auto sample_point = [&]() {
    if (obj.feasible_radius) {
      DenseVector dir = rng.normal_vector(n);
      const double r = *obj.feasible_radius * rng.uniform() / norm2(dir);
      for (double& e : dir) e *= r;
      return dir;
    }
    DenseVector x(n);
    for (double& e : x) e = rng.uniform(-options.box_radius, options.box_radius);
    return x;
  };
  auto into_region = [&](DenseVector x) {
    return obj.feasible_radius ? project_ball(x, *obj.feasible_radius) : x;
  };
  const double region_scale =
      obj.feasible_radius ? *obj.feasible_radius : options.box_radius;

  CertifyReport report;
  report.samples = samples;
  report.worst_convexity_margin = std::numeric_limits<double>::infinity();

  for (int s = 0; s < samples; ++s) {
    const DenseVector x = sample_point();
    const DenseVector gx = obj.gradient(x);
    DenseVector y;
    const bool probe = options.probe_every > 0 && s % options.probe_every == 0;
    if (probe) {
      // Secant power steps: d <- f'(x + h d) - f'(x), which for a quadratic is
      // the Hessian power iteration.
      DenseVector d = rng.normal_vector(n);
      const double h = 0.1 * region_scale;
      for (int step = 0; step < options.probe_steps; ++step) {
        const double dn = norm2(d);
        if (!(dn > 0.0) || !std::isfinite(dn)) break;
        const DenseVector p = into_region(axpby(1.0, x, h / dn, d));
        d = axpby(1.0, obj.gradient(p), -1.0, gx);
      }
      const double dn = norm2(d);
      if (!(dn > 0.0) || !std::isfinite(dn)) d = rng.normal_vector(n);
      y = into_region(axpby(1.0, x, region_scale * rng.uniform() / norm2(d), d));
    } else {
      y = sample_point();
    }

    const DenseVector gy = obj.gradient(y);
    const DenseVector dx = axpby(1.0, y, -1.0, x);
    const double dx_norm = norm2(dx);
    if (dx_norm == 0.0) continue;

    const double dg_norm = distance(gx, gy);
    const double lip_bound = obj.lip * dx_norm;
    const double lip_ratio = dg_norm / lip_bound;
    report.worst_lipschitz_ratio = std::max(report.worst_lipschitz_ratio, lip_ratio);
    const double lip_slack = options.rel_slack * (lip_bound + norm2(gx) + norm2(gy));
    if (dg_norm > lip_bound + lip_slack) ++report.lipschitz_violations;

    const double fx = obj.value(x);
    const double fy = obj.value(y);
    const double linear = dot(gx, dx);
    const double quad = 0.5 * obj.mu * dx_norm * dx_norm;
    const double gap = fy - fx - linear - quad;
    const double scale = std::abs(fx) + std::abs(fy) + std::abs(linear) + quad;
    const double margin = scale > 0.0 ? gap / scale : gap;
    report.worst_convexity_margin = std::min(report.worst_convexity_margin, margin);
    if (gap < -options.rel_slack * scale) ++report.convexity_violations;
  }
  return report;
}

// ---------------------------------------------------------------------------

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  if (m.rows() > 0xffffffffULL || m.cols() > 0xffffffffULL) {
    throw DimensionError("write_matrix: shape exceeds 32-bit header fields");
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_matrix: cannot open " + tmp.string());
    const auto rows = static_cast<std::uint32_t>(m.rows());
    const auto cols = static_cast<std::uint32_t>(m.cols());
    out.write(kMatrixMagic, sizeof kMatrixMagic);
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    const auto data = m.storage();
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size_bytes()));
    if (!out) throw std::runtime_error("write_matrix: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_matrix: cannot open " + path.string());
  char magic[sizeof kMatrixMagic];
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0) {
    throw std::runtime_error("read_matrix: bad header in " + path.string());
  }
  Matrix m(rows, cols);
  auto data = m.storage();
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
  if (!in) throw std::runtime_error("read_matrix: truncated file " + path.string());
  return m;
}

void write_vector(const std::filesystem::path& path, const DenseVector& v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.storage().begin());
  write_matrix(path, m);
}

DenseVector read_vector(const std::filesystem::path& path) {
  const Matrix m = read_matrix(path);
  if (m.cols() != 1) throw DimensionError("read_vector: expected a single column");
  const auto s = m.storage();
  return DenseVector(std::vector<double>(s.begin(), s.end()));
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace accel
