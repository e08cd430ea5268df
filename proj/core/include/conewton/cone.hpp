#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "conewton/errors.hpp"

namespace conewton {

enum class BlockKind { Orthant, SecondOrder, Psd };

struct ConeBlock {
    BlockKind kind;
    // Orthant: vector length n >= 1.
    // SecondOrder: total dimension d >= 2 including the leading scalar.
    // Psd: matrix order n >= 1.
    int dim;

    bool operator==(const ConeBlock&) const = default;
};

/// Cartesian product of nonnegative-orthant, second-order and PSD cone blocks.
/// Fixes the block structure of the ambient space, its rank, and the
/// coordinate layout used by linear maps (PSD blocks are stored in scaled
/// vectorized form: column-major lower triangle with off-diagonals times
/// sqrt(2), so coordinate dots realize the trace inner product).
///
/// The ambient inner product is the trace inner product of the underlying
/// algebra.  On orthant and vectorized-PSD coordinates it coincides with the
/// plain dot product; on second-order blocks it is twice the plain dot.  This
/// is the normalization under which the barrier gradient is -x^{-1} and the
/// nu-identity of the barrier holds with block rank 2 per second-order block.
struct ConeSpec {
    std::vector<ConeBlock> blocks;

    static ConeSpec orthant(int n) { return ConeSpec{{{BlockKind::Orthant, n}}}; }
    static ConeSpec second_order(int d) { return ConeSpec{{{BlockKind::SecondOrder, d}}}; }
    static ConeSpec psd(int n) { return ConeSpec{{{BlockKind::Psd, n}}}; }

    int num_blocks() const { return static_cast<int>(blocks.size()); }
    int block_rank(int b) const;
    int block_vec_dim(int b) const;

    /// Total rank nu = sum of block ranks.
    int rank() const;
    /// Total number of coordinates (PSD blocks contribute n(n+1)/2).
    int ambient_dim() const;
    /// Coordinate offset of each block, last entry = ambient_dim().
    std::vector<int> offsets() const;
    /// Throws StructuralError if the block list is empty or a dimension is
    /// out of range (orthant/psd >= 1, second-order >= 2).
    void validate() const;

    bool operator==(const ConeSpec&) const = default;
};

/// Per-block payload: `v` for orthant and second-order blocks, `m` (a
/// symmetric matrix) for PSD blocks.  Exactly one of the two is active.
struct Block {
    Eigen::VectorXd v;
    Eigen::MatrixXd m;
};

/// Block-structured point of the ambient space.
struct Element {
    std::vector<Block> blocks;
};

/// Spectral decomposition of one block: eigenvalues sorted descending with
/// the matching primitive idempotent frame.
struct BlockSpectral {
    Eigen::VectorXd eigenvalues;
    std::vector<Block> idempotents;
};

enum class ScalarFn { Sqrt, Inv, Log };

// -- construction -----------------------------------------------------------

Element zero_element(const ConeSpec& cone);
Element identity(const ConeSpec& cone);

/// Throws StructuralError if x does not conform to cone (block count, block
/// dimensions, PSD symmetry to 1e-14 relative).
void check_conformance(const ConeSpec& cone, const Element& x, const char* what = "element");

// -- coordinates -------------------------------------------------------------

/// Flatten to the coordinate vector (PSD blocks in scaled vectorized form).
Eigen::VectorXd to_coords(const ConeSpec& cone, const Element& x);
Element from_coords(const ConeSpec& cone, const Eigen::VectorXd& coords);

/// Per-coordinate weights of the ambient inner product (2 on second-order
/// coordinates, 1 elsewhere).
Eigen::VectorXd metric_weights(const ConeSpec& cone);

/// Riesz representative of the plain-coefficient functional x -> coeffs.x,
/// i.e. the element c with <c, x> = coeffs.dot(to_coords(x)) in the ambient
/// inner product.  Halves second-order coordinates; inverse of
/// functional_coords.
Element riesz_element(const ConeSpec& cone, const Eigen::VectorXd& coeffs);
Eigen::VectorXd functional_coords(const ConeSpec& cone, const Element& c);

// -- vector-space arithmetic --------------------------------------------------

Element add(const Element& x, const Element& y);
Element sub(const Element& x, const Element& y);
Element scale(double a, const Element& x);
/// x + a*y
Element axpy(const Element& x, double a, const Element& y);

// -- algebra -------------------------------------------------------------------

/// Blockwise Jordan product: elementwise / arrow product / symmetrized
/// matrix product.
Element jordan_product(const ConeSpec& cone, const Element& x, const Element& y);

/// Per-block spectral decomposition; eigenvalues sorted descending.  A
/// second-order block with zero off-part uses the first coordinate basis
/// vector as its frame direction.
std::vector<BlockSpectral> spectral_decompose(const ConeSpec& cone, const Element& x);

/// Apply g to the eigenvalues in the spectral frame.  Sqrt clamps eigenvalues
/// in [-1e-12 * scale, 0) to zero and rejects anything more negative; Inv
/// rejects zero eigenvalues; Log requires strictly positive eigenvalues.
Element scalar_calculus(const ConeSpec& cone, ScalarFn g, const Element& x);

/// Product of eigenvalues per block.
Eigen::VectorXd det_blocks(const ConeSpec& cone, const Element& x);
/// Product over all blocks.
double det(const ConeSpec& cone, const Element& x);

/// True iff every eigenvalue is strictly positive (no tolerance).
bool in_interior(const ConeSpec& cone, const Element& x);

// -- barrier --------------------------------------------------------------------

/// phi(x) = -sum_blocks ln det(block); requires in_interior(x).
double barrier_value(const ConeSpec& cone, const Element& x);
/// grad phi(x) = -x^{-1}; requires in_interior(x).
Element barrier_gradient(const ConeSpec& cone, const Element& x);

/// D^2 phi(z)[h] as an operator in the ambient inner product (the Jacobian of
/// z -> -z^{-1}).  Blockwise: orthant h/z^2; second-order
/// (2/d^2)(Jz)<Jz,h> - (1/d)Jh with the plain dot and d = det(z);
/// PSD Z^{-1} H Z^{-1}.  Requires in_interior(z).
Element hessian_apply(const ConeSpec& cone, const Element& z, const Element& h);
/// Inverse operator: orthant z^2 h; second-order 2 z<z,h> - d Jh; PSD Z H Z.
Element hessian_inv_apply(const ConeSpec& cone, const Element& z, const Element& h);

// -- metric ----------------------------------------------------------------------

int rank(const ConeSpec& cone);
/// Ambient (trace) inner product.
double inner(const ConeSpec& cone, const Element& x, const Element& y);
double norm(const ConeSpec& cone, const Element& x);

/// Spectral positive part: eigenvalues clamped at zero.
Element positive_part(const ConeSpec& cone, const Element& x);

/// Minimum eigenvalue across all blocks.
double min_eigenvalue(const ConeSpec& cone, const Element& x);

}  // namespace conewton
