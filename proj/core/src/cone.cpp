#include "conewton/cone.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

namespace conewton {

namespace {

WarningHandler g_warning_handler = nullptr;

constexpr double kSqrt2 = std::numbers::sqrt2;

}  // namespace

void set_warning_handler(WarningHandler handler) { g_warning_handler = handler; }

void warn(const std::string& message)
{
    if (g_warning_handler) {
        g_warning_handler(message);
    } else {
        std::cerr << "warning: " << message << "\n";
    }
}

int ConeSpec::block_rank(int b) const
{
    const ConeBlock& blk = blocks[b];
    switch (blk.kind) {
        case BlockKind::Orthant: return blk.dim;
        case BlockKind::SecondOrder: return 2;
        case BlockKind::Psd: return blk.dim;
    }
    return 0;
}

int ConeSpec::block_vec_dim(int b) const
{
    const ConeBlock& blk = blocks[b];
    switch (blk.kind) {
        case BlockKind::Orthant: return blk.dim;
        case BlockKind::SecondOrder: return blk.dim;
        case BlockKind::Psd: return blk.dim * (blk.dim + 1) / 2;
    }
    return 0;
}

int ConeSpec::rank() const
{
    int nu = 0;
    for (int b = 0; b < num_blocks(); ++b) nu += block_rank(b);
    return nu;
}

int ConeSpec::ambient_dim() const
{
    int n = 0;
    for (int b = 0; b < num_blocks(); ++b) n += block_vec_dim(b);
    return n;
}

std::vector<int> ConeSpec::offsets() const
{
    std::vector<int> off(blocks.size() + 1, 0);
    for (int b = 0; b < num_blocks(); ++b) off[b + 1] = off[b] + block_vec_dim(b);
    return off;
}

void ConeSpec::validate() const
{
    if (blocks.empty()) throw StructuralError("cone: at least one block required");
    for (const ConeBlock& blk : blocks) {
        switch (blk.kind) {
            case BlockKind::Orthant:
                if (blk.dim < 1) throw StructuralError("cone: orthant dimension must be >= 1");
                break;
            case BlockKind::SecondOrder:
                if (blk.dim < 2) throw StructuralError("cone: second-order dimension must be >= 2");
                break;
            case BlockKind::Psd:
                if (blk.dim < 1) throw StructuralError("cone: psd order must be >= 1");
                break;
        }
    }
}

Element zero_element(const ConeSpec& cone)
{
    Element x;
    x.blocks.resize(cone.blocks.size());
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        if (blk.kind == BlockKind::Psd) {
            x.blocks[b].m = Eigen::MatrixXd::Zero(blk.dim, blk.dim);
        } else {
            x.blocks[b].v = Eigen::VectorXd::Zero(blk.dim);
        }
    }
    return x;
}

Element identity(const ConeSpec& cone)
{
    Element e = zero_element(cone);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant: e.blocks[b].v.setOnes(); break;
            case BlockKind::SecondOrder: e.blocks[b].v(0) = 1.0; break;
            case BlockKind::Psd: e.blocks[b].m.setIdentity(); break;
        }
    }
    return e;
}

void check_conformance(const ConeSpec& cone, const Element& x, const char* what)
{
    if (static_cast<int>(x.blocks.size()) != cone.num_blocks())
        throw StructuralError(std::string(what) + ": block count mismatch");
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        const Block& xb = x.blocks[b];
        if (blk.kind == BlockKind::Psd) {
            if (xb.m.rows() != blk.dim || xb.m.cols() != blk.dim)
                throw StructuralError(std::string(what) + ": psd block dimension mismatch");
            const double scale = 1.0 + xb.m.cwiseAbs().maxCoeff();
            if ((xb.m - xb.m.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
                throw StructuralError(std::string(what) + ": psd block not symmetric");
        } else {
            if (xb.v.size() != blk.dim)
                throw StructuralError(std::string(what) + ": vector block dimension mismatch");
        }
    }
}

Eigen::VectorXd to_coords(const ConeSpec& cone, const Element& x)
{
    Eigen::VectorXd out(cone.ambient_dim());
    int pos = 0;
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        if (blk.kind == BlockKind::Psd) {
            const Eigen::MatrixXd& M = x.blocks[b].m;
            for (int j = 0; j < blk.dim; ++j)
                for (int i = j; i < blk.dim; ++i)
                    out(pos++) = (i == j) ? M(i, j) : kSqrt2 * M(i, j);
        } else {
            out.segment(pos, blk.dim) = x.blocks[b].v;
            pos += blk.dim;
        }
    }
    return out;
}

Element from_coords(const ConeSpec& cone, const Eigen::VectorXd& coords)
{
    if (coords.size() != cone.ambient_dim())
        throw StructuralError("from_coords: coordinate length mismatch");
    Element x = zero_element(cone);
    int pos = 0;
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        if (blk.kind == BlockKind::Psd) {
            Eigen::MatrixXd& M = x.blocks[b].m;
            for (int j = 0; j < blk.dim; ++j)
                for (int i = j; i < blk.dim; ++i) {
                    const double val = (i == j) ? coords(pos) : coords(pos) / kSqrt2;
                    M(i, j) = val;
                    M(j, i) = val;
                    ++pos;
                }
        } else {
            x.blocks[b].v = coords.segment(pos, blk.dim);
            pos += blk.dim;
        }
    }
    return x;
}

Eigen::VectorXd metric_weights(const ConeSpec& cone)
{
    Eigen::VectorXd w = Eigen::VectorXd::Ones(cone.ambient_dim());
    const std::vector<int> off = cone.offsets();
    for (int b = 0; b < cone.num_blocks(); ++b)
        if (cone.blocks[b].kind == BlockKind::SecondOrder)
            w.segment(off[b], cone.blocks[b].dim).setConstant(2.0);
    return w;
}

Element riesz_element(const ConeSpec& cone, const Eigen::VectorXd& coeffs)
{
    Element c = from_coords(cone, coeffs);
    for (int b = 0; b < cone.num_blocks(); ++b)
        if (cone.blocks[b].kind == BlockKind::SecondOrder) c.blocks[b].v *= 0.5;
    return c;
}

Eigen::VectorXd functional_coords(const ConeSpec& cone, const Element& c)
{
    Element u = c;
    for (int b = 0; b < cone.num_blocks(); ++b)
        if (cone.blocks[b].kind == BlockKind::SecondOrder) u.blocks[b].v *= 2.0;
    return to_coords(cone, u);
}

Element add(const Element& x, const Element& y)
{
    Element out = x;
    for (size_t b = 0; b < out.blocks.size(); ++b) {
        if (out.blocks[b].v.size() > 0)
            out.blocks[b].v += y.blocks[b].v;
        else
            out.blocks[b].m += y.blocks[b].m;
    }
    return out;
}

Element sub(const Element& x, const Element& y)
{
    Element out = x;
    for (size_t b = 0; b < out.blocks.size(); ++b) {
        if (out.blocks[b].v.size() > 0)
            out.blocks[b].v -= y.blocks[b].v;
        else
            out.blocks[b].m -= y.blocks[b].m;
    }
    return out;
}

Element scale(double a, const Element& x)
{
    Element out = x;
    for (Block& blk : out.blocks) {
        if (blk.v.size() > 0)
            blk.v *= a;
        else
            blk.m *= a;
    }
    return out;
}

Element axpy(const Element& x, double a, const Element& y)
{
    Element out = x;
    for (size_t b = 0; b < out.blocks.size(); ++b) {
        if (out.blocks[b].v.size() > 0)
            out.blocks[b].v += a * y.blocks[b].v;
        else
            out.blocks[b].m += a * y.blocks[b].m;
    }
    return out;
}

Element jordan_product(const ConeSpec& cone, const Element& x, const Element& y)
{
    check_conformance(cone, x, "jordan_product lhs");
    check_conformance(cone, y, "jordan_product rhs");
    Element out = zero_element(cone);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant:
                out.blocks[b].v = x.blocks[b].v.cwiseProduct(y.blocks[b].v);
                break;
            case BlockKind::SecondOrder: {
                const Eigen::VectorXd& xv = x.blocks[b].v;
                const Eigen::VectorXd& yv = y.blocks[b].v;
                Eigen::VectorXd& o = out.blocks[b].v;
                o(0) = xv.dot(yv);
                o.tail(blk.dim - 1) =
                    xv(0) * yv.tail(blk.dim - 1) + yv(0) * xv.tail(blk.dim - 1);
                break;
            }
            case BlockKind::Psd: {
                const Eigen::MatrixXd& X = x.blocks[b].m;
                const Eigen::MatrixXd& Y = y.blocks[b].m;
                Eigen::MatrixXd XY = X * Y;
                out.blocks[b].m = 0.5 * (XY + XY.transpose());
                break;
            }
        }
    }
    return out;
}

namespace {

// Second-order block spectral pieces: eigenvalues x0 +/- |xbar| with the
// frame direction xbar/|xbar| (first basis vector when xbar = 0).
void soc_spectral(const Eigen::VectorXd& x, double& lam1, double& lam2, Eigen::VectorXd& u)
{
    const int d = static_cast<int>(x.size());
    const double nb = x.tail(d - 1).norm();
    lam1 = x(0) + nb;
    lam2 = x(0) - nb;
    u = Eigen::VectorXd::Zero(d - 1);
    if (nb > 0.0)
        u = x.tail(d - 1) / nb;
    else
        u(0) = 1.0;
}

Eigen::VectorXd soc_recombine(double a0, double a1, const Eigen::VectorXd& u)
{
    // a0 * v1 + a1 * v2 with v_{1,2} = (1, +/-u)/2.
    Eigen::VectorXd out(u.size() + 1);
    out(0) = 0.5 * (a0 + a1);
    out.tail(u.size()) = 0.5 * (a0 - a1) * u;
    return out;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> psd_eigen(const Eigen::MatrixXd& M)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success)
        throw NumericalError("psd eigendecomposition did not converge");
    return es;
}

}  // namespace

std::vector<BlockSpectral> spectral_decompose(const ConeSpec& cone, const Element& x)
{
    check_conformance(cone, x, "spectral_decompose");
    std::vector<BlockSpectral> out(cone.num_blocks());
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        BlockSpectral& sp = out[b];
        switch (blk.kind) {
            case BlockKind::Orthant: {
                const Eigen::VectorXd& v = x.blocks[b].v;
                std::vector<int> order(blk.dim);
                for (int i = 0; i < blk.dim; ++i) order[i] = i;
                std::stable_sort(order.begin(), order.end(),
                                 [&](int i, int j) { return v(i) > v(j); });
                sp.eigenvalues.resize(blk.dim);
                sp.idempotents.resize(blk.dim);
                for (int i = 0; i < blk.dim; ++i) {
                    sp.eigenvalues(i) = v(order[i]);
                    sp.idempotents[i].v = Eigen::VectorXd::Zero(blk.dim);
                    sp.idempotents[i].v(order[i]) = 1.0;
                }
                break;
            }
            case BlockKind::SecondOrder: {
                double lam1, lam2;
                Eigen::VectorXd u;
                soc_spectral(x.blocks[b].v, lam1, lam2, u);
                sp.eigenvalues.resize(2);
                sp.eigenvalues << lam1, lam2;
                sp.idempotents.resize(2);
                sp.idempotents[0].v = soc_recombine(1.0, 0.0, u);
                sp.idempotents[1].v = soc_recombine(0.0, 1.0, u);
                break;
            }
            case BlockKind::Psd: {
                auto es = psd_eigen(x.blocks[b].m);
                sp.eigenvalues.resize(blk.dim);
                sp.idempotents.resize(blk.dim);
                // Eigen sorts ascending; emit descending.
                for (int i = 0; i < blk.dim; ++i) {
                    const int src = blk.dim - 1 - i;
                    sp.eigenvalues(i) = es.eigenvalues()(src);
                    const Eigen::VectorXd q = es.eigenvectors().col(src);
                    sp.idempotents[i].m = q * q.transpose();
                }
                break;
            }
        }
    }
    return out;
}

namespace {

double apply_scalar(ScalarFn g, double lam, double scale)
{
    switch (g) {
        case ScalarFn::Sqrt:
            if (lam < -1e-12 * scale)
                throw DomainError("scalar_calculus: sqrt of negative eigenvalue");
            return std::sqrt(std::max(lam, 0.0));
        case ScalarFn::Inv:
            if (lam == 0.0) throw DomainError("scalar_calculus: inverse of zero eigenvalue");
            return 1.0 / lam;
        case ScalarFn::Log:
            if (lam <= 0.0) throw DomainError("scalar_calculus: log of non-positive eigenvalue");
            return std::log(lam);
    }
    return 0.0;
}

}  // namespace

Element scalar_calculus(const ConeSpec& cone, ScalarFn g, const Element& x)
{
    check_conformance(cone, x, "scalar_calculus");
    Element out = zero_element(cone);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant: {
                const Eigen::VectorXd& v = x.blocks[b].v;
                const double scale = 1.0 + v.cwiseAbs().maxCoeff();
                for (int i = 0; i < blk.dim; ++i)
                    out.blocks[b].v(i) = apply_scalar(g, v(i), scale);
                break;
            }
            case BlockKind::SecondOrder: {
                double lam1, lam2;
                Eigen::VectorXd u;
                soc_spectral(x.blocks[b].v, lam1, lam2, u);
                const double scale = 1.0 + std::max(std::abs(lam1), std::abs(lam2));
                out.blocks[b].v = soc_recombine(apply_scalar(g, lam1, scale),
                                                apply_scalar(g, lam2, scale), u);
                break;
            }
            case BlockKind::Psd: {
                auto es = psd_eigen(x.blocks[b].m);
                const Eigen::VectorXd& lam = es.eigenvalues();
                const double scale = 1.0 + lam.cwiseAbs().maxCoeff();
                Eigen::VectorXd mapped(blk.dim);
                for (int i = 0; i < blk.dim; ++i) mapped(i) = apply_scalar(g, lam(i), scale);
                out.blocks[b].m = es.eigenvectors() * mapped.asDiagonal() *
                                  es.eigenvectors().transpose();
                break;
            }
        }
    }
    return out;
}

Eigen::VectorXd det_blocks(const ConeSpec& cone, const Element& x)
{
    check_conformance(cone, x, "det");
    Eigen::VectorXd out(cone.num_blocks());
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant:
                out(b) = x.blocks[b].v.prod();
                break;
            case BlockKind::SecondOrder: {
                const Eigen::VectorXd& v = x.blocks[b].v;
                out(b) = v(0) * v(0) - v.tail(blk.dim - 1).squaredNorm();
                break;
            }
            case BlockKind::Psd: {
                auto es = psd_eigen(x.blocks[b].m);
                out(b) = es.eigenvalues().prod();
                break;
            }
        }
    }
    return out;
}

double det(const ConeSpec& cone, const Element& x) { return det_blocks(cone, x).prod(); }

double min_eigenvalue(const ConeSpec& cone, const Element& x)
{
    check_conformance(cone, x, "min_eigenvalue");
    double lo = std::numeric_limits<double>::infinity();
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant:
                lo = std::min(lo, x.blocks[b].v.minCoeff());
                break;
            case BlockKind::SecondOrder: {
                const Eigen::VectorXd& v = x.blocks[b].v;
                lo = std::min(lo, v(0) - v.tail(blk.dim - 1).norm());
                break;
            }
            case BlockKind::Psd:
                lo = std::min(lo, psd_eigen(x.blocks[b].m).eigenvalues().minCoeff());
                break;
        }
    }
    return lo;
}

bool in_interior(const ConeSpec& cone, const Element& x)
{
    return min_eigenvalue(cone, x) > 0.0;
}

double barrier_value(const ConeSpec& cone, const Element& x)
{
    if (!in_interior(cone, x)) throw DomainError("barrier_value: point not in cone interior");
    double phi = 0.0;
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant:
                phi -= x.blocks[b].v.array().log().sum();
                break;
            case BlockKind::SecondOrder: {
                const Eigen::VectorXd& v = x.blocks[b].v;
                phi -= std::log(v(0) * v(0) - v.tail(blk.dim - 1).squaredNorm());
                break;
            }
            case BlockKind::Psd:
                phi -= psd_eigen(x.blocks[b].m).eigenvalues().array().log().sum();
                break;
        }
    }
    return phi;
}

Element barrier_gradient(const ConeSpec& cone, const Element& x)
{
    if (!in_interior(cone, x))
        throw DomainError("barrier_gradient: point not in cone interior");
    return scale(-1.0, scalar_calculus(cone, ScalarFn::Inv, x));
}

Element hessian_apply(const ConeSpec& cone, const Element& z, const Element& h)
{
    if (!in_interior(cone, z)) throw DomainError("hessian_apply: point not in cone interior");
    check_conformance(cone, h, "hessian_apply direction");
    Element out = zero_element(cone);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant:
                out.blocks[b].v =
                    h.blocks[b].v.cwiseQuotient(z.blocks[b].v.cwiseProduct(z.blocks[b].v));
                break;
            case BlockKind::SecondOrder: {
                const Eigen::VectorXd& zv = z.blocks[b].v;
                const Eigen::VectorXd& hv = h.blocks[b].v;
                const double d = zv(0) * zv(0) - zv.tail(blk.dim - 1).squaredNorm();
                Eigen::VectorXd jz(blk.dim), jh(blk.dim);
                jz(0) = zv(0);
                jz.tail(blk.dim - 1) = -zv.tail(blk.dim - 1);
                jh(0) = hv(0);
                jh.tail(blk.dim - 1) = -hv.tail(blk.dim - 1);
                out.blocks[b].v = (2.0 / (d * d)) * jz.dot(hv) * jz - jh / d;
                break;
            }
            case BlockKind::Psd: {
                auto es = psd_eigen(z.blocks[b].m);
                Eigen::MatrixXd zinv = es.eigenvectors() *
                                       es.eigenvalues().cwiseInverse().asDiagonal() *
                                       es.eigenvectors().transpose();
                Eigen::MatrixXd T = zinv * h.blocks[b].m * zinv;
                out.blocks[b].m = 0.5 * (T + T.transpose());
                break;
            }
        }
    }
    return out;
}

Element hessian_inv_apply(const ConeSpec& cone, const Element& z, const Element& h)
{
    if (!in_interior(cone, z))
        throw DomainError("hessian_inv_apply: point not in cone interior");
    check_conformance(cone, h, "hessian_inv_apply direction");
    Element out = zero_element(cone);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant:
                out.blocks[b].v =
                    h.blocks[b].v.cwiseProduct(z.blocks[b].v.cwiseProduct(z.blocks[b].v));
                break;
            case BlockKind::SecondOrder: {
                const Eigen::VectorXd& zv = z.blocks[b].v;
                const Eigen::VectorXd& hv = h.blocks[b].v;
                const double d = zv(0) * zv(0) - zv.tail(blk.dim - 1).squaredNorm();
                Eigen::VectorXd jh(blk.dim);
                jh(0) = hv(0);
                jh.tail(blk.dim - 1) = -hv.tail(blk.dim - 1);
                out.blocks[b].v = 2.0 * zv.dot(hv) * zv - d * jh;
                break;
            }
            case BlockKind::Psd: {
                Eigen::MatrixXd T = z.blocks[b].m * h.blocks[b].m * z.blocks[b].m;
                out.blocks[b].m = 0.5 * (T + T.transpose());
                break;
            }
        }
    }
    return out;
}

int rank(const ConeSpec& cone) { return cone.rank(); }

double inner(const ConeSpec& cone, const Element& x, const Element& y)
{
    check_conformance(cone, x, "inner lhs");
    check_conformance(cone, y, "inner rhs");
    double acc = 0.0;
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant:
                acc += x.blocks[b].v.dot(y.blocks[b].v);
                break;
            case BlockKind::SecondOrder:
                acc += 2.0 * x.blocks[b].v.dot(y.blocks[b].v);
                break;
            case BlockKind::Psd:
                acc += x.blocks[b].m.cwiseProduct(y.blocks[b].m).sum();
                break;
        }
    }
    return acc;
}

double norm(const ConeSpec& cone, const Element& x) { return std::sqrt(inner(cone, x, x)); }

Element positive_part(const ConeSpec& cone, const Element& x)
{
    Element out = zero_element(cone);
    const auto decomp = spectral_decompose(cone, x);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const BlockSpectral& sp = decomp[b];
        for (int i = 0; i < sp.eigenvalues.size(); ++i) {
            const double lam = std::max(sp.eigenvalues(i), 0.0);
            if (lam == 0.0) continue;
            if (cone.blocks[b].kind == BlockKind::Psd)
                out.blocks[b].m += lam * sp.idempotents[i].m;
            else
                out.blocks[b].v += lam * sp.idempotents[i].v;
        }
    }
    return out;
}

}  // namespace conewton
