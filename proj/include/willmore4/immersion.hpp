#pragma once

#include "willmore4/jets.hpp"
#include "willmore4/types.hpp"

#include <array>
#include <memory>
#include <vector>

namespace w4 {

// Pointwise derivative data of an immersion patch Phi: U in R^4 -> R^m,
// everything an energy density needs: value, first, second, third derivatives.
struct PatchJet {
  int m = 0;
  VecA value;
  MatA4 d1;                            // m x 4, column a = d_a Phi
  std::array<VecA, sym2_count> d2;     // d_a d_b Phi by sym2 slot
  std::array<VecA, sym3_count> d3;     // d_a d_b d_c Phi by sym3 slot

  void resize(int ambient);
};

class ImmersionPatch {
public:
  virtual ~ImmersionPatch() = default;
  virtual int ambient_dim() const = 0;
  virtual void eval(const Vec4& z, PatchJet& out) const = 0;
};

// One polynomial term of a vector-valued map: coeff * z^exps.
struct PolyTerm {
  std::array<int, 4> exps{};
  VecA coeff;
};

// Phi(z) = sum of polynomial terms; ambient dimension fixed at construction.
class PolynomialImmersion : public ImmersionPatch {
public:
  PolynomialImmersion(int ambient, std::vector<PolyTerm> terms);
  int ambient_dim() const override { return m_; }
  void eval(const Vec4& z, PatchJet& out) const override;
  const std::vector<PolyTerm>& terms() const { return terms_; }

private:
  int m_;
  std::vector<PolyTerm> terms_;
};

// Graph z -> (z, phi(z)) with polynomial phi: R^4 -> R^codim.
PolynomialImmersion graph_immersion(int codim, const std::vector<PolyTerm>& phi_terms);

// Stereographic chart of the unit round sphere in R^5,
//   Phi(z) = (2 z, sign (|z|^2 - 1)) / (1 + |z|^2).
// The two signs give the two charts of the atlas; each covers a hemisphere on
// |z| <= 1 and together they cover the sphere (equator has measure zero).
class StereographicSphere : public ImmersionPatch {
public:
  explicit StereographicSphere(int chart /* 0 or 1 */) : sign_(chart == 0 ? 1.0 : -1.0) {}
  int ambient_dim() const override { return 5; }
  void eval(const Vec4& z, PatchJet& out) const override;

private:
  double sign_;
};

// Lower cap of the unit sphere as a graph: phi(z) = 1 - sqrt(1 - |z|^2).
class SphereGraphCap : public ImmersionPatch {
public:
  int ambient_dim() const override { return 5; }
  void eval(const Vec4& z, PatchJet& out) const override;
};

// Ambient-space transforms and a linear reparametrization, built as wrappers
// so invariance tests can reuse any base patch.
class ScaledPatch : public ImmersionPatch {
public:
  ScaledPatch(std::shared_ptr<const ImmersionPatch> base, double lambda)
      : base_(std::move(base)), lambda_(lambda) {}
  int ambient_dim() const override { return base_->ambient_dim(); }
  void eval(const Vec4& z, PatchJet& out) const override;

private:
  std::shared_ptr<const ImmersionPatch> base_;
  double lambda_;
};

class TranslatedPatch : public ImmersionPatch {
public:
  TranslatedPatch(std::shared_ptr<const ImmersionPatch> base, VecA shift)
      : base_(std::move(base)), shift_(std::move(shift)) {}
  int ambient_dim() const override { return base_->ambient_dim(); }
  void eval(const Vec4& z, PatchJet& out) const override;

private:
  std::shared_ptr<const ImmersionPatch> base_;
  VecA shift_;
};

class RotatedPatch : public ImmersionPatch {
public:
  RotatedPatch(std::shared_ptr<const ImmersionPatch> base, MatAA q)
      : base_(std::move(base)), q_(std::move(q)) {}
  int ambient_dim() const override { return base_->ambient_dim(); }
  void eval(const Vec4& z, PatchJet& out) const override;

private:
  std::shared_ptr<const ImmersionPatch> base_;
  MatAA q_;
};

class ReparametrizedPatch : public ImmersionPatch {
public:
  ReparametrizedPatch(std::shared_ptr<const ImmersionPatch> base, Mat4 a)
      : base_(std::move(base)), a_(std::move(a)) {}
  int ambient_dim() const override { return base_->ambient_dim(); }
  void eval(const Vec4& z, PatchJet& out) const override;

private:
  std::shared_ptr<const ImmersionPatch> base_;
  Mat4 a_;
};

// Component Taylor table of a patch at a point, for jet-based postprocessing.
Jet patch_component_jet(const PatchJet& p, int component, int order);

// Inverse of the above: fill a PatchJet from m order-3 component jets.
void patch_from_jets(const Jet* comp, int m, PatchJet& out);

} // namespace w4
