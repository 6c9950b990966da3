#include "nemalab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace nemalab {

namespace {

// FFTW's planner is not re-entrant; execution of an existing plan on new
// arrays is.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() { clear(); }

  PlanPair get(const Grid& grid) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(grid.dim(), grid.sizes(), threads_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    int n[3] = {grid.size(0), grid.size(1), grid.size(2)};
    std::vector<double> real(grid.point_count());
    std::vector<Complex> cplx(grid.mode_count());
    if (!threads_initialised_) {
      fftw_init_threads();
      threads_initialised_ = true;
    }
    fftw_plan_with_nthreads(threads_);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.forward = fftw_plan_dft_r2c(grid.dim(), n, real.data(), reinterpret_cast<fftw_complex*>(cplx.data()), flags);
    p.inverse = fftw_plan_dft_c2r(grid.dim(), n, reinterpret_cast<fftw_complex*>(cplx.data()), real.data(), flags);
    if (!p.forward || !p.inverse) throw std::runtime_error("FFTW plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

  void set_threads(int threads) {
    std::lock_guard<std::mutex> lock(mutex_);
    threads_ = threads;
  }
  int threads() const { return threads_; }

  void clear() {
    std::lock_guard<std::mutex> lock(mutex_);
    for (auto& [key, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.inverse);
    }
    plans_.clear();
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::array<int, 3>, int>, PlanPair> plans_;
  int threads_ = 1;
  bool threads_initialised_ = false;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

std::size_t mode_index(const std::array<int, 3>& shape, const std::array<int, 3>& idx) {
  return (static_cast<std::size_t>(idx[0]) * shape[1] + idx[1]) * shape[2] + idx[2];
}

}  // namespace

void set_fft_threads(int threads) {
  if (threads < 1) throw std::invalid_argument("FFT thread count must be >= 1");
  plan_cache().set_threads(threads);
}

int fft_threads() { return plan_cache().threads(); }

Spectrum transform_forward(const RealField& f) {
  if (!f.all_finite()) throw std::invalid_argument("transform_forward: non-finite sample values");
  const Grid& grid = f.grid();
  Spectrum out(grid);
  const PlanPair p = plan_cache().get(grid);
  // r2c leaves its input intact for out-of-place plans.
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(f.values().data()),
                       reinterpret_cast<fftw_complex*>(out.coeffs().data()));
  const double scale = 1.0 / static_cast<double>(grid.point_count());
  for (auto& c : out.coeffs()) c *= scale;
  return out;
}

RealField transform_inverse(const Spectrum& s, FieldRole role) {
  const Grid& grid = s.grid();
  // c2r overwrites its input.
  std::vector<Complex> scratch(s.coeffs().begin(), s.coeffs().end());
  RealField out(grid, role);
  const PlanPair p = plan_cache().get(grid);
  fftw_execute_dft_c2r(p.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.values().data());
  return out;
}

Spectrum lambda_pow(const Spectrum& s, double order) {
  Spectrum out = s;
  if (order == 0.0) return out;
  const auto& r = s.grid().lattice().xi_norm;
  auto c = out.coeffs();
  auto factor = [order](double x) {
    if (order == 1.0) return x;
    if (order == -1.0) return 1.0 / x;
    return std::pow(x, order);
  };
  for (std::size_t m = 0; m < c.size(); ++m) c[m] = (r[m] > 0.0) ? c[m] * factor(r[m]) : Complex{};
  return out;
}

Spectrum derivative(const Spectrum& s, int axis) {
  if (axis < 0 || axis >= s.grid().dim()) throw std::invalid_argument("derivative: axis out of range");
  const auto& lat = s.grid().lattice();
  Spectrum out(s.grid());
  auto in = s.coeffs();
  auto c = out.coeffs();
  const std::uint8_t bit = static_cast<std::uint8_t>(1u << axis);
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (lat.nyquist[m] & bit) continue;
    const double k = lat.xi[m][axis];
    c[m] = Complex(-k * in[m].imag(), k * in[m].real());
  }
  return out;
}

Spectrum laplacian(const Spectrum& s) {
  const auto& r = s.grid().lattice().xi_norm;
  Spectrum out = s;
  auto c = out.coeffs();
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= -r[m] * r[m];
  return out;
}

Spectrum mean_free(const Spectrum& s) {
  Spectrum out = s;
  out[0] = Complex{};
  return out;
}

namespace {

std::array<int, 3> dealias_cutoff(const Grid& grid, double fraction) {
  std::array<int, 3> cut{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) cut[a] = static_cast<int>(std::floor(fraction * grid.size(a) / 2.0 + 1e-12));
  return cut;
}

bool retained(const std::array<int, 3>& k, const std::array<int, 3>& cut, int dim) {
  for (int a = 0; a < dim; ++a)
    if (std::abs(k[a]) > cut[a]) return false;
  return true;
}

}  // namespace

void dealias_in_place(Spectrum& s, double fraction) {
  const Grid& grid = s.grid();
  const auto cut = dealias_cutoff(grid, fraction);
  const auto& k = grid.lattice().wavenumber;
  auto c = s.coeffs();
  for (std::size_t m = 0; m < c.size(); ++m)
    if (!retained(k[m], cut, grid.dim())) c[m] = Complex{};
}

Spectrum dealias(const Spectrum& s, double fraction) {
  Spectrum out = s;
  dealias_in_place(out, fraction);
  return out;
}

std::size_t dealias_retained_count(const Grid& grid, double fraction) {
  const auto cut = dealias_cutoff(grid, fraction);
  const auto& lat = grid.lattice();
  std::size_t n = 0;
  for (std::size_t m = 0; m < lat.wavenumber.size(); ++m)
    if (retained(lat.wavenumber[m], cut, grid.dim())) n += static_cast<std::size_t>(lat.weight[m]);
  return n;
}

Spectrum pad(const Spectrum& s, int factor) {
  if (factor < 1) throw std::invalid_argument("pad: factor must be >= 1");
  const Grid& coarse = s.grid();
  const Grid fine = coarse.refined(factor);
  const int dim = coarse.dim();
  const int last = dim - 1;
  const auto& clat = coarse.lattice();
  const auto& fshape = fine.lattice().shape;
  Spectrum out(fine);
  auto in = s.coeffs();
  auto dst = out.coeffs();

  for (std::size_t m = 0; m < in.size(); ++m) {
    if (in[m] == Complex{}) continue;
    const auto& k = clat.wavenumber[m];
    // A coarse Nyquist coefficient is the sum of the ±n/2 harmonics; split it.
    std::array<std::array<int, 2>, 3> targets{};
    std::array<int, 3> ntargets{1, 1, 1};
    double scale = 1.0;
    for (int a = 0; a < 3; ++a) {
      if (a >= dim) {
        targets[a] = {0, 0};
        continue;
      }
      const int nf = fine.size(a);
      const bool nyq = (clat.nyquist[m] >> a) & 1u;
      if (a == last) {
        targets[a][0] = std::abs(k[a]);
        if (nyq && factor > 1) scale *= 0.5;
      } else if (nyq && factor > 1) {
        const int kn = std::abs(k[a]);
        targets[a] = {kn, nf - kn};
        ntargets[a] = 2;
        scale *= 0.5;
      } else {
        targets[a][0] = k[a] >= 0 ? k[a] : nf + k[a];
      }
    }
    for (int t0 = 0; t0 < ntargets[0]; ++t0)
      for (int t1 = 0; t1 < ntargets[1]; ++t1)
        for (int t2 = 0; t2 < ntargets[2]; ++t2) {
          const std::array<int, 3> idx{targets[0][t0], targets[1][t1], targets[2][t2]};
          dst[mode_index(fshape, idx)] += scale * in[m];
        }
  }
  return out;
}

Spectrum truncate(const Spectrum& s, const Grid& coarse) {
  const Grid& fine = s.grid();
  if (coarse.dim() != fine.dim() || coarse.periods() != fine.periods())
    throw std::invalid_argument("truncate: grids must share dimension and periods");
  for (int a = 0; a < fine.dim(); ++a)
    if (coarse.size(a) > fine.size(a)) throw std::invalid_argument("truncate: target grid is finer than the source");
  const auto& clat = coarse.lattice();
  const auto& fshape = fine.lattice().shape;
  Spectrum out(coarse);
  for (std::size_t m = 0; m < out.size(); ++m) {
    if (clat.nyquist[m]) continue;
    const auto& k = clat.wavenumber[m];
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < fine.dim(); ++a) idx[a] = k[a] >= 0 ? k[a] : fine.size(a) + k[a];
    out[m] = s[mode_index(fshape, idx)];
  }
  return out;
}

RealField exact_product(const RealField& f, const RealField& g) {
  require_same_grid(f.grid(), g.grid(), "exact_product");
  const RealField ff = transform_inverse(pad(transform_forward(f), 2));
  const RealField gg = transform_inverse(pad(transform_forward(g), 2));
  return pointwise_product(ff, gg);
}

std::vector<Spectrum> grad_spectral(const Spectrum& f) {
  std::vector<Spectrum> out;
  for (int a = 0; a < f.grid().dim(); ++a) out.push_back(derivative(f, a));
  return out;
}

Spectrum div_spectral(const std::vector<Spectrum>& v) {
  if (v.empty()) throw std::invalid_argument("div: empty vector field");
  const int dim = v.front().grid().dim();
  if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("div: component count must equal dimension");
  Spectrum out(v.front().grid());
  for (int a = 0; a < dim; ++a) out += derivative(v[a], a);
  return out;
}

std::vector<Spectrum> forward_all(const std::vector<RealField>& fields) {
  std::vector<Spectrum> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(transform_forward(f));
  return out;
}

std::vector<RealField> inverse_all(const std::vector<Spectrum>& spectra, FieldRole role) {
  std::vector<RealField> out;
  out.reserve(spectra.size());
  for (const auto& s : spectra) out.push_back(transform_inverse(s, role));
  return out;
}

VectorField grad(const RealField& f) {
  return VectorField(inverse_all(grad_spectral(transform_forward(f)), FieldRole::vector_component));
}

RealField div(const VectorField& v) { return transform_inverse(div_spectral(forward_all(v.components()))); }

MatrixField curl_mat(const VectorField& v) {
  const int dim = v.grid().dim();
  if (v.size() != dim) throw std::invalid_argument("curl_mat: component count must equal dimension");
  const auto vs = forward_all(v.components());
  MatrixField out(v.grid(), dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (i != j) out(i, j) = transform_inverse(derivative(vs[i], j) - derivative(vs[j], i), FieldRole::matrix_component);
  return out;
}

VectorField div_rows(const MatrixField& m) {
  const int dim = m.grid().dim();
  if (m.cols() != dim) throw std::invalid_argument("div_rows: column count must equal dimension");
  VectorField out(m.grid(), m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    Spectrum acc(m.grid());
    for (int j = 0; j < dim; ++j) acc += derivative(transform_forward(m(i, j)), j);
    out[i] = transform_inverse(acc, FieldRole::vector_component);
  }
  return out;
}

VectorField curl_of_matrix(const MatrixField& m) {
  const int dim = m.grid().dim();
  if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("curl_of_matrix: square dim x dim matrix required");
  VectorField out(m.grid(), dim);
  for (int i = 0; i < dim; ++i) {
    Spectrum acc(m.grid());
    for (int j = 0; j < dim; ++j) acc += derivative(transform_forward(m(j, i)), j);
    out[i] = transform_inverse(acc, FieldRole::vector_component);
  }
  return out;
}

}  // namespace nemalab
