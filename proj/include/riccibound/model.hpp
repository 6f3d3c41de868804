#pragma once
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rb {

enum class ModelKind {
  Euclidean,
  Sphere,
  Hyperbolic,
  GaussianSoliton,
  CigarSoliton,
  WarpedCustom,
  SingularFieldModel,
};

std::string kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& s);

// Named warp profiles for WarpedCustom. All satisfy f(0)=0, f'(0)=1.
//   Linear:   f = s
//   Sin:      f = sin(c s)/c
//   Sinh:     f = sinh(c s)/c
//   CubicCap: f = s + c s^3   (c < 0 gives positive curvature)
enum class WarpKind { Linear, Sin, Sinh, CubicCap };

struct ModelSpec {
  ModelKind kind = ModelKind::Euclidean;
  int dim = 3;
  double lambda = 0.0;  // modified-Ricci lower-bound parameter, >= 0
  double K = 0.0;       // |V|(y) <= K / d(y,O)^alpha
  double alpha = 0.0;   // in [0,1)
  double rho = 0.1;     // noncollapsing: vol(B(x,1)) >= rho
  double curvature = 1.0;        // sphere / hyperbolic sectional curvature magnitude
  double soliton_lambda = 1.0;   // Gaussian soliton constant
  WarpKind warp = WarpKind::Linear;
  double warp_param = 1.0;
  int field_sign = -1;  // singular field direction: -1 inward, +1 outward

  std::string serialize() const;
  static ModelSpec deserialize(const std::string& text);
  bool operator==(const ModelSpec&) const = default;
};

struct InvalidSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularEvaluation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr double kEpsMin = 1e-10;  // guard radius at the singular origin of V

struct BakryEmeryCondition {
  double K1 = 0.0;   // Hoelder constant of L
  double a = 0.5;    // Hoelder exponent, in (0,1)
  double K2 = 0.0;   // scaled L^q bound of grad L
  double beta = 0.0; // in [0,1)
  double q = 1.0;    // >= 1
  void validate() const;
};

enum class SolitonMode { ShrinkExpand, Steady };

struct SolitonNormalization {
  SolitonMode mode;
  double Lambda;  // derived gradient bound
  // Lambda = sqrt(2 lambda K) if lambda>0; 1 if lambda=0;
  //          sqrt(-2 lambda K + C1n) if lambda<0, C1n user-supplied.
  static SolitonNormalization derive(double lambda, double K, double C1n);
};

// Rotationally symmetric model about the origin O. Immutable, evaluators pure.
class Model {
 public:
  explicit Model(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  int n() const { return spec_.dim; }
  std::string name() const;

  // Warp function of the polar metric g = ds^2 + f(s)^2 g_{S^{n-1}}.
  double f(double s) const;
  double fp(double s) const;
  double fpp(double s) const;
  double s_max() const;  // domain limit (pi/sqrt(k) for spheres, else large)

  bool has_potential() const;
  double L(double s) const;
  double Lp(double s) const;   // dL/ds; V = Lp(s) * e_s for potential models
  double Lpp(double s) const;

  bool has_field() const;
  // Signed radial field profile: V(y) = v(d(y,O)) * e_s, positive = outward.
  double v(double s) const;
  double vp(double s) const;

  double field_norm(double s) const;  // |V| at distance s from O
  bool flat_base() const;             // metric is Euclidean (field models)
  bool is_soliton() const;
  double soliton_constant() const;    // lambda in Ric + Hess L = lambda g
  double scalar_curvature(double s) const;

 private:
  ModelSpec spec_;
};

Model build_model(const ModelSpec& spec);
std::shared_ptr<const Model> catalog_model(ModelKind k);
const std::vector<ModelSpec>& catalog();

// |V|(point at distance d from O), with the catalog-bound flag.
struct FieldNorm {
  double value;
  bool bound_violated;  // true when |V| > K / d^alpha + tol
};
FieldNorm vector_field_norm(const Model& m, double d_from_origin);

}  // namespace rb
