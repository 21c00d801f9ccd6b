#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "metallab/numlin.hpp"
#include "metallab/report.hpp"

namespace metallab {

/// Metallic number sigma = (p + sqrt(p^2 + 4q)) / 2 and its conjugate
/// sigma_bar = p - sigma, the two roots of x^2 - p x - q.
struct MetallicParams {
  int p = 1;
  int q = 1;
  double sigma = 0.0;
  double sigma_bar = 0.0;
};

MetallicParams metallic_number(int p, int q);

enum class StructureKind { DiagonalPattern, ProductInduced, Custom };
enum class AxisValue { Sigma, SigmaBar };
enum class ProductSign { Plus, Minus };

/// Almost product structure F on R^m: symmetric with F^2 = I.
struct ProductStructure {
  Mat matrix;
  std::size_t ambient_dim() const { return matrix.rows(); }
};

/// Constant (1,1)-tensor J on Euclidean R^m with J^2 = pJ + qI and J
/// symmetric. Constant J on flat space is parallel, so every structure here
/// is locally metallic.
class StructureOp {
public:
  StructureOp() = default;

  std::size_t ambient_dim() const { return matrix_.rows(); }
  const Mat& matrix() const { return matrix_; }
  const MetallicParams& params() const { return params_; }
  StructureKind kind() const { return kind_; }

  Vec apply(const Vec& x) const { return matrix_ * x; }

  /// The almost product structure F with J = (p/2)I + s((2 sigma - p)/2)F.
  /// For declared product structures this is the declared F and sign;
  /// otherwise F = (2J - pI)/(2 sigma - p) and sign +.
  const ProductStructure& product() const { return product_; }
  ProductSign product_sign() const { return sign_; }

  friend StructureOp diagonal_structure(std::span<const AxisValue> pattern, const MetallicParams& params);
  friend StructureOp from_product(const ProductStructure& f, const MetallicParams& params, ProductSign sign);
  friend StructureOp custom_structure(const Mat& j, const MetallicParams& params);

private:
  StructureOp(Mat matrix, MetallicParams params, StructureKind kind);

  Mat matrix_;
  MetallicParams params_;
  StructureKind kind_ = StructureKind::Custom;
  ProductStructure product_;
  ProductSign sign_ = ProductSign::Plus;
};

StructureOp diagonal_structure(std::span<const AxisValue> pattern, const MetallicParams& params);

/// J = (p/2)I +- ((2 sigma - p)/2)F. Throws InvalidProduct when F is not
/// square, not symmetric, or F^2 != I within 1e-9.
StructureOp from_product(const ProductStructure& f, const MetallicParams& params, ProductSign sign);

/// Wraps an arbitrary matrix without validation. Run verify_structure (or
/// use validated_structure) before relying on it.
StructureOp custom_structure(const Mat& j, const MetallicParams& params);

/// custom_structure followed by verify_structure; throws InvalidStructure on
/// failure.
StructureOp validated_structure(const Mat& j, const MetallicParams& params, std::size_t samples = 32,
                                std::uint64_t seed = 1);

/// Residual check of J^2 = pJ + qI, <JX,Y> = <X,JY> and
/// <JX,JY> = p<JX,Y> + q<X,Y> over random unit vector pairs.
CheckReport verify_structure(const StructureOp& j, std::size_t samples, std::uint64_t seed);

/// J^{-1} = (J - pI)/q.
Mat inverse(const StructureOp& j);

}  // namespace metallab
