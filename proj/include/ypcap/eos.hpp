#pragma once

// Equations of state for the fully saturated (solid + liquid) phase.
//
// Every EOS here speaks thermodynamic pressure P (compression positive) in Pa,
// density in kg/m^3, temperature in K and specific internal energy in J/kg.
// The constitutive kernel converts to tension-positive mean stress, p = -P.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ypcap/errors.hpp"

namespace ypcap {

enum class RangePolicy { Strict, Clamp };

template <class E>
concept Eos = requires(const E& eos, double x, double y) {
  { eos.pressure(x, y) } -> std::convertible_to<double>;
  { eos.energy(x, y) } -> std::convertible_to<double>;
  { eos.temperature_from_energy(x, y) } -> std::convertible_to<double>;
  { eos.density_from_pressure(x, y) } -> std::convertible_to<double>;
  { eos.tangent_bulk_modulus(x, y) } -> std::convertible_to<double>;
};

namespace detail {
inline std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}
}  // namespace detail

/// Closed-form stand-in for a tabular EOS:
///   E = cv T
///   P = k0/n ((rho/rho_ref)^n - 1) + gamma0 rho_ref cv (T - t_ref)
/// With the default stiffening exponent n = 1 the cold curve is linear in
/// density. Every query is exactly invertible.
struct AnalyticEos {
  double rho_ref = 2000.0;
  double t_ref = 298.15;
  double k0 = 10e9;
  double gamma0 = 0.0;
  double cv = 1000.0;
  double stiffening = 1.0;
  RangePolicy policy = RangePolicy::Strict;

  void validate() const {
    if (!(k0 > 0.0)) throw ValidationError("analytic EOS: k0 > 0 violated");
    if (!(cv > 0.0)) throw ValidationError("analytic EOS: cv > 0 violated");
    if (!(rho_ref > 0.0)) throw ValidationError("analytic EOS: rho_ref > 0 violated");
    if (!(stiffening > 0.0)) throw ValidationError("analytic EOS: stiffening exponent > 0 violated");
    if (!(t_ref >= 0.0)) throw ValidationError("analytic EOS: t_ref >= 0 violated");
  }

  double pressure(double rho, double t) const {
    rho = check_rho(rho);
    t = check_t(t);
    return cold(rho) + thermal(t);
  }

  double energy(double rho, double t) const {
    check_rho(rho);
    return cv * check_t(t);
  }

  double temperature_from_energy(double rho, double e) const {
    check_rho(rho);
    return check_t(e / cv);
  }

  double density_from_pressure(double p, double t) const {
    t = check_t(t);
    const double x = 1.0 + stiffening * (p - thermal(t)) / k0;
    if (!(x > 0.0)) {
      if (policy == RangePolicy::Clamp) return std::numeric_limits<double>::min();
      throw OutOfTableRange("analytic EOS: pressure " + detail::fmt_num(p) +
                            " Pa is below the tensile limit of the cold curve");
    }
    return rho_ref * (stiffening == 1.0 ? x : std::pow(x, 1.0 / stiffening));
  }

  /// rho dP/drho at fixed T.
  double tangent_bulk_modulus(double rho, double t) const {
    rho = check_rho(rho);
    check_t(t);
    const double k = k0 * (stiffening == 1.0 ? rho / rho_ref : std::pow(rho / rho_ref, stiffening));
    if (!(k > 0.0)) throw NonPositiveModulus("analytic EOS: non-positive tangent modulus");
    return k;
  }

 private:
  double cold(double rho) const {
    const double ratio = rho / rho_ref;
    if (stiffening == 1.0) return k0 * (ratio - 1.0);
    return k0 / stiffening * (std::pow(ratio, stiffening) - 1.0);
  }
  double thermal(double t) const { return gamma0 * rho_ref * cv * (t - t_ref); }

  double check_rho(double rho) const {
    if (rho > 0.0 && std::isfinite(rho)) return rho;
    throw OutOfTableRange("analytic EOS: density must be positive, got " + detail::fmt_num(rho));
  }
  double check_t(double t) const {
    if (t >= 0.0 && std::isfinite(t)) return t;
    if (policy == RangePolicy::Clamp && std::isfinite(t)) return 0.0;
    throw OutOfTableRange("analytic EOS: temperature must be non-negative, got " + detail::fmt_num(t));
  }

  friend bool operator==(const AnalyticEos&, const AnalyticEos&) = default;
};

/// Rectilinear (rho, T) table with bilinear interpolation of P and E.
class EosTable {
 public:
  EosTable(std::vector<double> rho, std::vector<double> t, std::vector<double> p,
           std::vector<double> e, RangePolicy policy = RangePolicy::Strict)
      : rho_(std::move(rho)), t_(std::move(t)), p_(std::move(p)), e_(std::move(e)), policy_(policy) {
    validate();
  }

  /// Parse the plain-text `ypcap-eos 1` format.
  static EosTable parse(std::istream& in, RangePolicy policy = RangePolicy::Strict);
  static EosTable load(const std::string& path, RangePolicy policy = RangePolicy::Strict) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, 0, "cannot open EOS table '" + path + "'");
    return parse(in, policy);
  }

  /// Sample an analytic EOS onto a uniform nr x nt grid.
  static EosTable tabulate(const AnalyticEos& eos, double rho_min, double rho_max, std::size_t nr,
                           double t_min, double t_max, std::size_t nt) {
    std::vector<double> rho(nr), t(nt), p(nr * nt), e(nr * nt);
    for (std::size_t i = 0; i < nr; ++i)
      rho[i] = rho_min + (rho_max - rho_min) * static_cast<double>(i) / static_cast<double>(nr - 1);
    for (std::size_t j = 0; j < nt; ++j)
      t[j] = t_min + (t_max - t_min) * static_cast<double>(j) / static_cast<double>(nt - 1);
    for (std::size_t i = 0; i < nr; ++i) {
      for (std::size_t j = 0; j < nt; ++j) {
        p[i * nt + j] = eos.pressure(rho[i], t[j]);
        e[i * nt + j] = eos.energy(rho[i], t[j]);
      }
    }
    return EosTable(std::move(rho), std::move(t), std::move(p), std::move(e));
  }

  void write(std::ostream& out) const;

  void set_policy(RangePolicy policy) { policy_ = policy; }
  RangePolicy policy() const { return policy_; }

  const std::vector<double>& rho_grid() const { return rho_; }
  const std::vector<double>& t_grid() const { return t_; }
  const std::vector<double>& p_surface() const { return p_; }
  const std::vector<double>& e_surface() const { return e_; }

  double pressure(double rho, double t) const { return bilinear(p_, rho, t); }
  double energy(double rho, double t) const { return bilinear(e_, rho, t); }

  /// Invert E(rho, .) along the rho-interpolated column. The interpolant is
  /// piecewise linear in T, so bracketing by bisection over the T nodes
  /// followed by a linear solve inside the bracket is exact.
  double temperature_from_energy(double rho, double e) const {
    const auto [i, w] = locate(rho_, clamp_or_throw(rho, rho_, "density"));
    auto column = [&](std::size_t j) { return (1.0 - w) * at(e_, i, j) + w * at(e_, i + 1, j); };
    const std::size_t nt = t_.size();
    const double lo = column(0);
    const double hi = column(nt - 1);
    if (e < lo || e > hi) {
      if (policy_ == RangePolicy::Strict || !std::isfinite(e))
        throw OutOfTableRange("EOS table: energy " + detail::fmt_num(e) + " J/kg outside [" +
                              detail::fmt_num(lo) + ", " + detail::fmt_num(hi) + "] at rho " +
                              detail::fmt_num(rho));
      return e < lo ? t_.front() : t_.back();
    }
    std::size_t a = 0, b = nt - 1;
    while (b - a > 1) {
      const std::size_t m = (a + b) / 2;
      (column(m) <= e ? a : b) = m;
    }
    const double ea = column(a), eb = column(b);
    const double s = (e - ea) / (eb - ea);
    return (1.0 - s) * t_[a] + s * t_[b];
  }

  /// Invert P(., T) along the T-interpolated isotherm.
  double density_from_pressure(double p, double t) const {
    const auto [j, w] = locate(t_, clamp_or_throw(t, t_, "temperature"));
    auto row = [&](std::size_t i) { return (1.0 - w) * at(p_, i, j) + w * at(p_, i, j + 1); };
    const std::size_t nr = rho_.size();
    const double lo = row(0);
    const double hi = row(nr - 1);
    if (p < lo || p > hi) {
      if (policy_ == RangePolicy::Strict || !std::isfinite(p))
        throw OutOfTableRange("EOS table: pressure " + detail::fmt_num(p) + " Pa outside [" +
                              detail::fmt_num(lo) + ", " + detail::fmt_num(hi) + "] at T " +
                              detail::fmt_num(t));
      return p < lo ? rho_.front() : rho_.back();
    }
    std::size_t a = 0, b = nr - 1;
    while (b - a > 1) {
      const std::size_t m = (a + b) / 2;
      (row(m) < p ? a : b) = m;
    }
    const double pa = row(a), pb = row(b);
    if (pb == pa) return rho_[a];
    const double s = (p - pa) / (pb - pa);
    return (1.0 - s) * rho_[a] + s * rho_[b];
  }

  /// rho dP/drho at fixed T by central difference on the interpolant.
  double tangent_bulk_modulus(double rho, double t) const {
    rho = clamp_or_throw(rho, rho_, "density");
    t = clamp_or_throw(t, t_, "temperature");
    const double h = 1e-6 * rho;
    const double lo = std::max(rho - h, rho_.front());
    const double hi = std::min(rho + h, rho_.back());
    const double k = rho * (pressure(hi, t) - pressure(lo, t)) / (hi - lo);
    if (!(k > 0.0))
      throw NonPositiveModulus("EOS table: non-positive tangent bulk modulus at rho " +
                               detail::fmt_num(rho) + ", T " + detail::fmt_num(t));
    return k;
  }

 private:
  void validate() const {
    const std::size_t nr = rho_.size(), nt = t_.size();
    if (nr < 2 || nt < 2) throw ValidationError("EOS table: grids need at least 2 points");
    if (p_.size() != nr * nt || e_.size() != nr * nt)
      throw ValidationError("EOS table: surface size does not match NR*NT");
    for (std::size_t i = 1; i < nr; ++i)
      if (!(rho_[i] > rho_[i - 1]))
        throw NonMonotoneColumn("EOS table: RHO grid not strictly increasing at index " + std::to_string(i));
    for (std::size_t j = 1; j < nt; ++j)
      if (!(t_[j] > t_[j - 1]))
        throw NonMonotoneColumn("EOS table: T grid not strictly increasing at index " + std::to_string(j));
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 1; j < nt; ++j)
        if (!(at(e_, i, j) > at(e_, i, j - 1)))
          throw NonMonotoneColumn("EOS table: E not strictly increasing in T at rho index " +
                                  std::to_string(i) + ", T index " + std::to_string(j));
    for (std::size_t j = 0; j < nt; ++j)
      for (std::size_t i = 1; i < nr; ++i)
        if (!(at(p_, i, j) >= at(p_, i - 1, j)))
          throw NonMonotoneColumn("EOS table: P decreasing in rho at T index " + std::to_string(j) +
                                  ", rho index " + std::to_string(i));
  }

  double at(const std::vector<double>& f, std::size_t i, std::size_t j) const {
    return f[i * t_.size() + j];
  }

  double clamp_or_throw(double x, const std::vector<double>& grid, const char* what) const {
    if (x >= grid.front() && x <= grid.back()) return x;
    if (policy_ == RangePolicy::Clamp && std::isfinite(x)) return std::clamp(x, grid.front(), grid.back());
    throw OutOfTableRange(std::string("EOS table: ") + what + " " + detail::fmt_num(x) +
                          " outside [" + detail::fmt_num(grid.front()) + ", " +
                          detail::fmt_num(grid.back()) + "]");
  }

  /// Cell index and weight of x in a strictly increasing grid (x inside the hull).
  static std::pair<std::size_t, double> locate(const std::vector<double>& grid, double x) {
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
    i = std::min(i, grid.size() - 2);
    return {i, (x - grid[i]) / (grid[i + 1] - grid[i])};
  }

  double bilinear(const std::vector<double>& f, double rho, double t) const {
    const auto [i, wr] = locate(rho_, clamp_or_throw(rho, rho_, "density"));
    const auto [j, wt] = locate(t_, clamp_or_throw(t, t_, "temperature"));
    return (1.0 - wr) * ((1.0 - wt) * at(f, i, j) + wt * at(f, i, j + 1)) +
           wr * ((1.0 - wt) * at(f, i + 1, j) + wt * at(f, i + 1, j + 1));
  }

  std::vector<double> rho_, t_, p_, e_;
  RangePolicy policy_;
};

namespace detail {

/// Whitespace tokenizer that skips `#` comments and remembers positions.
class TableTokens {
 public:
  explicit TableTokens(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::size_t pos = 0;
      while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        if (pos >= line.size()) break;
        std::size_t end = pos;
        while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
        tokens_.push_back({line.substr(pos, end - pos), lineno, static_cast<int>(pos) + 1});
        pos = end;
      }
    }
    last_line_ = lineno;
  }

  void expect(const std::string& word) {
    const auto& tok = next(word.c_str());
    if (tok.text != word) throw ParseError(tok.line, tok.col, "expected '" + word + "', got '" + tok.text + "'");
  }

  long integer(const char* what) {
    const auto& tok = next(what);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok.text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.text.size()) throw ParseError(tok.line, tok.col, std::string("expected integer ") + what);
    return v;
  }

  double number(const char* what) {
    const auto& tok = next(what);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok.text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.text.size() || !std::isfinite(v))
      throw ParseError(tok.line, tok.col, std::string("expected number for ") + what + ", got '" + tok.text + "'");
    return v;
  }

  void expect_end() const {
    if (pos_ < tokens_.size())
      throw ParseError(tokens_[pos_].line, tokens_[pos_].col, "unexpected trailing token '" + tokens_[pos_].text + "'");
  }

 private:
  struct Token {
    std::string text;
    int line;
    int col;
  };

  const Token& next(const char* what) {
    if (pos_ >= tokens_.size()) throw ParseError(last_line_ + 1, 1, std::string("unexpected end of file, expected ") + what);
    return tokens_[pos_++];
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 0;
};

}  // namespace detail

inline EosTable EosTable::parse(std::istream& in, RangePolicy policy) {
  detail::TableTokens tok(in);
  tok.expect("ypcap-eos");
  if (tok.integer("format version") != 1) throw ParseError(1, 11, "unsupported ypcap-eos version");
  tok.expect("NR");
  const long nr = tok.integer("NR");
  tok.expect("NT");
  const long nt = tok.integer("NT");
  if (nr < 2 || nt < 2) throw ValidationError("EOS table: NR and NT must be >= 2");
  std::vector<double> rho(static_cast<std::size_t>(nr)), t(static_cast<std::size_t>(nt));
  std::vector<double> p(static_cast<std::size_t>(nr * nt)), e(static_cast<std::size_t>(nr * nt));
  tok.expect("RHO");
  for (auto& v : rho) v = tok.number("RHO");
  tok.expect("T");
  for (auto& v : t) v = tok.number("T");
  tok.expect("P");
  for (auto& v : p) v = tok.number("P");
  tok.expect("E");
  for (auto& v : e) v = tok.number("E");
  tok.expect_end();
  return EosTable(std::move(rho), std::move(t), std::move(p), std::move(e), policy);
}

inline void EosTable::write(std::ostream& out) const {
  const auto old = out.precision(17);
  const std::size_t nt = t_.size();
  out << "ypcap-eos 1\n";
  out << "NR " << rho_.size() << " NT " << nt << "\n";
  out << "RHO";
  for (double v : rho_) out << ' ' << v;
  out << "  # kg/m^3\nT";
  for (double v : t_) out << ' ' << v;
  out << "  # K\nP\n";
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    for (std::size_t j = 0; j < nt; ++j) out << (j ? " " : "") << p_[i * nt + j];
    out << '\n';
  }
  out << "E\n";
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    for (std::size_t j = 0; j < nt; ++j) out << (j ? " " : "") << e_[i * nt + j];
    out << '\n';
  }
  out.precision(old);
}

/// Runtime-selected EOS; satisfies the Eos concept by dispatch.
class AnyEos {
 public:
  AnyEos(AnalyticEos eos) : impl_(std::move(eos)) {}  // NOLINT(google-explicit-constructor)
  AnyEos(EosTable eos) : impl_(std::move(eos)) {}     // NOLINT(google-explicit-constructor)

  double pressure(double rho, double t) const {
    return std::visit([&](const auto& e) { return e.pressure(rho, t); }, impl_);
  }
  double energy(double rho, double t) const {
    return std::visit([&](const auto& e) { return e.energy(rho, t); }, impl_);
  }
  double temperature_from_energy(double rho, double e) const {
    return std::visit([&](const auto& x) { return x.temperature_from_energy(rho, e); }, impl_);
  }
  double density_from_pressure(double p, double t) const {
    return std::visit([&](const auto& e) { return e.density_from_pressure(p, t); }, impl_);
  }
  double tangent_bulk_modulus(double rho, double t) const {
    return std::visit([&](const auto& e) { return e.tangent_bulk_modulus(rho, t); }, impl_);
  }

  void set_policy(RangePolicy policy) {
    std::visit(
        [&](auto& e) {
          if constexpr (std::is_same_v<std::decay_t<decltype(e)>, AnalyticEos>)
            e.policy = policy;
          else
            e.set_policy(policy);
        },
        impl_);
  }

  const std::variant<AnalyticEos, EosTable>& variant() const { return impl_; }

 private:
  std::variant<AnalyticEos, EosTable> impl_;
};

static_assert(Eos<AnalyticEos>);
static_assert(Eos<EosTable>);
static_assert(Eos<AnyEos>);

}  // namespace ypcap
