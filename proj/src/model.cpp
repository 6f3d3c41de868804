#include "riccibound/model.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

namespace rb {

namespace {
const std::map<ModelKind, std::string> kKindNames = {
    {ModelKind::Euclidean, "euclidean"},
    {ModelKind::Sphere, "sphere"},
    {ModelKind::Hyperbolic, "hyperbolic"},
    {ModelKind::GaussianSoliton, "gaussian_soliton"},
    {ModelKind::CigarSoliton, "cigar_soliton"},
    {ModelKind::WarpedCustom, "warped_custom"},
    {ModelKind::SingularFieldModel, "singular_field"},
};

const std::map<WarpKind, std::string> kWarpNames = {
    {WarpKind::Linear, "linear"},
    {WarpKind::Sin, "sin"},
    {WarpKind::Sinh, "sinh"},
    {WarpKind::CubicCap, "cubic_cap"},
};
}  // namespace

std::string kind_name(ModelKind k) { return kKindNames.at(k); }

ModelKind kind_from_name(const std::string& s) {
  for (const auto& [k, v] : kKindNames)
    if (v == s) return k;
  throw InvalidSpec("unknown model kind: " + s);
}

void BakryEmeryCondition::validate() const {
  if (!(K1 >= 0)) throw InvalidSpec("BakryEmeryCondition.K1 must be >= 0");
  if (!(a > 0 && a < 1)) throw InvalidSpec("BakryEmeryCondition.a must be in (0,1)");
  if (!(K2 >= 0)) throw InvalidSpec("BakryEmeryCondition.K2 must be >= 0");
  if (!(beta >= 0 && beta < 1))
    throw InvalidSpec("BakryEmeryCondition.beta must be in [0,1)");
  if (!(q >= 1)) throw InvalidSpec("BakryEmeryCondition.q must be >= 1");
}

SolitonNormalization SolitonNormalization::derive(double lambda, double K,
                                                  double C1n) {
  SolitonNormalization out;
  out.mode = (lambda == 0.0) ? SolitonMode::Steady : SolitonMode::ShrinkExpand;
  if (lambda > 0)
    out.Lambda = std::sqrt(2 * lambda * K);
  else if (lambda == 0)
    out.Lambda = 1.0;
  else
    out.Lambda = std::sqrt(-2 * lambda * K + C1n);
  return out;
}

Model::Model(ModelSpec spec) : spec_(spec) {
  if (spec_.dim < 2) throw InvalidSpec("dimension: must be >= 2");
  if (!(spec_.lambda >= 0)) throw InvalidSpec("lambda: must be >= 0");
  if (!(spec_.K >= 0)) throw InvalidSpec("K: must be >= 0");
  if (!(spec_.alpha >= 0 && spec_.alpha < 1))
    throw InvalidSpec("alpha: must be in [0,1)");
  if (!(spec_.rho > 0)) throw InvalidSpec("rho: must be > 0");
  if ((spec_.kind == ModelKind::Sphere || spec_.kind == ModelKind::Hyperbolic) &&
      !(spec_.curvature > 0))
    throw InvalidSpec("curvature: magnitude must be > 0");
  if (spec_.kind == ModelKind::CigarSoliton && spec_.dim != 2)
    throw InvalidSpec("dimension: cigar soliton is two-dimensional");
  if (spec_.kind == ModelKind::WarpedCustom) {
    // f(0)=0, f'(0)=1, f>0 inside the domain.
    if (std::abs(f(0.0)) > 1e-12 || std::abs(fp(0.0) - 1.0) > 1e-12)
      throw InvalidSpec("warp: requires f(0)=0, f'(0)=1");
    double sm = s_max();
    for (int i = 1; i <= 64; ++i) {
      double s = std::min(sm, 8.0) * i / 64.0;
      if (!(f(s) > 0)) throw InvalidSpec("warp: f must stay positive");
    }
  }
}

std::string Model::name() const { return kind_name(spec_.kind); }

double Model::f(double s) const {
  switch (spec_.kind) {
    case ModelKind::Euclidean:
    case ModelKind::GaussianSoliton:
    case ModelKind::SingularFieldModel:
      return s;
    case ModelKind::Sphere: {
      double a = 1.0 / std::sqrt(spec_.curvature);
      return a * std::sin(s / a);
    }
    case ModelKind::Hyperbolic: {
      double a = 1.0 / std::sqrt(spec_.curvature);
      return a * std::sinh(s / a);
    }
    case ModelKind::CigarSoliton:
      return 2.0 * std::tanh(s / 2.0);
    case ModelKind::WarpedCustom: {
      double c = spec_.warp_param;
      switch (spec_.warp) {
        case WarpKind::Linear: return s;
        case WarpKind::Sin: return std::sin(c * s) / c;
        case WarpKind::Sinh: return std::sinh(c * s) / c;
        case WarpKind::CubicCap: return s + c * s * s * s;
      }
    }
  }
  return s;
}

double Model::fp(double s) const {
  switch (spec_.kind) {
    case ModelKind::Euclidean:
    case ModelKind::GaussianSoliton:
    case ModelKind::SingularFieldModel:
      return 1.0;
    case ModelKind::Sphere: {
      double a = 1.0 / std::sqrt(spec_.curvature);
      return std::cos(s / a);
    }
    case ModelKind::Hyperbolic: {
      double a = 1.0 / std::sqrt(spec_.curvature);
      return std::cosh(s / a);
    }
    case ModelKind::CigarSoliton: {
      double c = std::cosh(s / 2.0);
      return 1.0 / (c * c);
    }
    case ModelKind::WarpedCustom: {
      double c = spec_.warp_param;
      switch (spec_.warp) {
        case WarpKind::Linear: return 1.0;
        case WarpKind::Sin: return std::cos(c * s);
        case WarpKind::Sinh: return std::cosh(c * s);
        case WarpKind::CubicCap: return 1.0 + 3.0 * c * s * s;
      }
    }
  }
  return 1.0;
}

double Model::fpp(double s) const {
  switch (spec_.kind) {
    case ModelKind::Euclidean:
    case ModelKind::GaussianSoliton:
    case ModelKind::SingularFieldModel:
      return 0.0;
    case ModelKind::Sphere: {
      double a = 1.0 / std::sqrt(spec_.curvature);
      return -std::sin(s / a) / a;
    }
    case ModelKind::Hyperbolic: {
      double a = 1.0 / std::sqrt(spec_.curvature);
      return std::sinh(s / a) / a;
    }
    case ModelKind::CigarSoliton: {
      double c = std::cosh(s / 2.0);
      return -std::tanh(s / 2.0) / (c * c);
    }
    case ModelKind::WarpedCustom: {
      double c = spec_.warp_param;
      switch (spec_.warp) {
        case WarpKind::Linear: return 0.0;
        case WarpKind::Sin: return -c * std::sin(c * s);
        case WarpKind::Sinh: return c * std::sinh(c * s);
        case WarpKind::CubicCap: return 6.0 * c * s;
      }
    }
  }
  return 0.0;
}

double Model::s_max() const {
  switch (spec_.kind) {
    case ModelKind::Sphere:
      return M_PI / std::sqrt(spec_.curvature);
    case ModelKind::WarpedCustom:
      if (spec_.warp == WarpKind::Sin) return M_PI / spec_.warp_param;
      if (spec_.warp == WarpKind::CubicCap && spec_.warp_param < 0)
        return std::sqrt(-1.0 / (3.0 * spec_.warp_param));  // first zero of f'
      return std::numeric_limits<double>::infinity();
    default:
      return std::numeric_limits<double>::infinity();
  }
}

bool Model::has_potential() const {
  return spec_.kind == ModelKind::GaussianSoliton ||
         spec_.kind == ModelKind::CigarSoliton;
}

double Model::L(double s) const {
  if (spec_.kind == ModelKind::GaussianSoliton)
    return 0.5 * spec_.soliton_lambda * s * s;
  if (spec_.kind == ModelKind::CigarSoliton)
    return -2.0 * std::log(std::cosh(s / 2.0));
  throw InvalidSpec("potential: model has none");
}

double Model::Lp(double s) const {
  if (spec_.kind == ModelKind::GaussianSoliton) return spec_.soliton_lambda * s;
  if (spec_.kind == ModelKind::CigarSoliton) return -std::tanh(s / 2.0);
  throw InvalidSpec("potential: model has none");
}

double Model::Lpp(double s) const {
  if (spec_.kind == ModelKind::GaussianSoliton) return spec_.soliton_lambda;
  if (spec_.kind == ModelKind::CigarSoliton) {
    double c = std::cosh(s / 2.0);
    return -0.5 / (c * c);
  }
  throw InvalidSpec("potential: model has none");
}

bool Model::has_field() const {
  return has_potential() || spec_.kind == ModelKind::SingularFieldModel;
}

double Model::v(double s) const {
  if (has_potential()) return Lp(s);
  if (spec_.kind == ModelKind::SingularFieldModel) {
    if (s < kEpsMin) throw SingularEvaluation("field evaluated at the origin");
    return spec_.field_sign * spec_.K * std::pow(s, -spec_.alpha);
  }
  return 0.0;
}

double Model::vp(double s) const {
  if (has_potential()) return Lpp(s);
  if (spec_.kind == ModelKind::SingularFieldModel) {
    if (s < kEpsMin) throw SingularEvaluation("field evaluated at the origin");
    return spec_.field_sign * spec_.K * (-spec_.alpha) *
           std::pow(s, -spec_.alpha - 1.0);
  }
  return 0.0;
}

double Model::field_norm(double s) const {
  return has_field() ? std::abs(v(s)) : 0.0;
}

bool Model::flat_base() const {
  return spec_.kind == ModelKind::Euclidean ||
         spec_.kind == ModelKind::GaussianSoliton ||
         spec_.kind == ModelKind::SingularFieldModel;
}

bool Model::is_soliton() const { return has_potential(); }

double Model::soliton_constant() const {
  if (spec_.kind == ModelKind::GaussianSoliton) return spec_.soliton_lambda;
  if (spec_.kind == ModelKind::CigarSoliton) return 0.0;
  throw InvalidSpec("soliton: model is not a soliton");
}

double Model::scalar_curvature(double s) const {
  int n = spec_.dim;
  if (flat_base()) return 0.0;
  if (s < 1e-8) {
    // Limit s->0: R = n(n-1) * k0 with k0 = -f'''(0) (all sectional equal).
    double h = 1e-4;
    double k0 = -(fpp(2 * h) - fpp(h)) / h;  // f'' ~ -k0 s near 0
    return n * (n - 1) * k0;
  }
  double F = f(s), Fp = fp(s), Fpp = fpp(s);
  return -2.0 * (n - 1) * Fpp / F +
         (n - 1) * (n - 2) * (1.0 - Fp * Fp) / (F * F);
}

std::string ModelSpec::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind = " << kind_name(kind) << "\n"
     << "dim = " << dim << "\n"
     << "lambda = " << lambda << "\n"
     << "K = " << K << "\n"
     << "alpha = " << alpha << "\n"
     << "rho = " << rho << "\n"
     << "curvature = " << curvature << "\n"
     << "soliton_lambda = " << soliton_lambda << "\n"
     << "warp = " << kWarpNames.at(warp) << "\n"
     << "warp_param = " << warp_param << "\n"
     << "field_sign = " << field_sign << "\n";
  return os.str();
}

ModelSpec ModelSpec::deserialize(const std::string& text) {
  ModelSpec s;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string t) {
      auto b = t.find_first_not_of(" \t");
      auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "kind") s.kind = kind_from_name(val);
    else if (key == "dim") s.dim = std::stoi(val);
    else if (key == "lambda") s.lambda = std::stod(val);
    else if (key == "K") s.K = std::stod(val);
    else if (key == "alpha") s.alpha = std::stod(val);
    else if (key == "rho") s.rho = std::stod(val);
    else if (key == "curvature") s.curvature = std::stod(val);
    else if (key == "soliton_lambda") s.soliton_lambda = std::stod(val);
    else if (key == "warp_param") s.warp_param = std::stod(val);
    else if (key == "field_sign") s.field_sign = std::stoi(val);
    else if (key == "warp") {
      bool found = false;
      for (const auto& [k, v] : kWarpNames)
        if (v == val) { s.warp = k; found = true; }
      if (!found) throw InvalidSpec("unknown warp: " + val);
    } else {
      throw InvalidSpec("unknown spec field: " + key);
    }
  }
  return s;
}

Model build_model(const ModelSpec& spec) { return Model(spec); }

const std::vector<ModelSpec>& catalog() {
  static const std::vector<ModelSpec> v = [] {
    std::vector<ModelSpec> c;
    ModelSpec m;

    m = ModelSpec{};
    m.kind = ModelKind::Euclidean; m.dim = 3; m.rho = 1.0;
    c.push_back(m);

    m = ModelSpec{};
    m.kind = ModelKind::Sphere; m.dim = 3; m.curvature = 1.0; m.rho = 1.0;
    c.push_back(m);

    m = ModelSpec{};
    m.kind = ModelKind::Hyperbolic; m.dim = 3; m.curvature = 1.0;
    m.lambda = 2.0; m.rho = 1.0;
    c.push_back(m);

    m = ModelSpec{};
    m.kind = ModelKind::GaussianSoliton; m.dim = 2; m.soliton_lambda = 1.0;
    m.K = 4.0; m.alpha = 0.0; m.rho = 1.0;
    c.push_back(m);

    m = ModelSpec{};
    m.kind = ModelKind::CigarSoliton; m.dim = 2; m.K = 1.0; m.alpha = 0.0;
    m.rho = 1.0;
    c.push_back(m);

    m = ModelSpec{};
    m.kind = ModelKind::WarpedCustom; m.dim = 3; m.warp = WarpKind::CubicCap;
    m.warp_param = -0.1; m.rho = 1.0;
    c.push_back(m);

    m = ModelSpec{};
    m.kind = ModelKind::SingularFieldModel; m.dim = 3; m.K = 1.0;
    m.alpha = 0.5; m.field_sign = -1; m.lambda = 0.0; m.rho = 1.0;
    c.push_back(m);
    return c;
  }();
  return v;
}

std::shared_ptr<const Model> catalog_model(ModelKind k) {
  for (const auto& s : catalog())
    if (s.kind == k) return std::make_shared<Model>(build_model(s));
  throw InvalidSpec("model not in catalog");
}

FieldNorm vector_field_norm(const Model& m, double d_from_origin) {
  if (m.has_field() && m.spec().alpha > 0 && d_from_origin < kEpsMin)
    throw SingularEvaluation("vector_field_norm at d < eps_min");
  FieldNorm out{m.field_norm(d_from_origin), false};
  if (m.spec().K > 0) {
    double bound = m.spec().alpha > 0
                       ? m.spec().K * std::pow(d_from_origin, -m.spec().alpha)
                       : m.spec().K;
    out.bound_violated = out.value > bound + 1e-9;
  }
  return out;
}

}  // namespace rb
