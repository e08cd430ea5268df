#include "conewton/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

#include "conewton/errors.hpp"

namespace conewton {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what)
{
    std::ostringstream msg;
    msg << path << ":" << line << ": " << what;
    throw ParseError(msg.str());
}

std::vector<std::string> tokenize(const std::string& line)
{
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

double parse_value(const std::string& tok, const std::string& path, int line)
{
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) parse_fail(path, line, "malformed numeric value '" + tok + "'");
        return v;
    } catch (const std::invalid_argument&) {
        parse_fail(path, line, "malformed numeric value '" + tok + "'");
    } catch (const std::out_of_range&) {
        parse_fail(path, line, "numeric value out of range '" + tok + "'");
    }
}

enum class RowSense { Objective, Eq, Le, Ge };

struct MpsModel {
    std::string name;
    std::vector<std::string> row_names;
    std::vector<RowSense> row_sense;
    std::map<std::string, int> row_index;  // excludes the objective row
    std::string obj_name;
    std::vector<std::string> col_names;
    std::map<std::string, int> col_index;
    // Column entries: (row, value); row -1 denotes the objective.
    std::vector<std::vector<std::pair<int, double>>> cols;
    std::vector<double> rhs;
    double obj_rhs = 0.0;
    std::vector<double> range;  // NaN when absent
    std::vector<double> lower, upper;
    std::vector<bool> is_free;
};

MpsModel parse_mps_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");

    MpsModel model;
    enum Section { None, Rows, Columns, Rhs, Ranges, Bounds, Done } section = None;
    std::string line;
    int lineno = 0;
    bool warned_duplicate = false;

    auto add_entry = [&](int col, int row, double val) {
        auto& entries = model.cols[col];
        for (auto& e : entries) {
            if (e.first == row) {
                e.second += val;
                if (!warned_duplicate) {
                    warn(path + ": duplicate COLUMNS entries summed");
                    warned_duplicate = true;
                }
                return;
            }
        }
        entries.emplace_back(row, val);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '*') continue;
        const bool is_header = !std::isspace(static_cast<unsigned char>(line[0]));
        const auto toks = tokenize(line);
        if (toks.empty()) continue;

        if (is_header) {
            const std::string& head = toks[0];
            if (head == "NAME") {
                model.name = toks.size() > 1 ? toks[1] : "";
            } else if (head == "ROWS") {
                section = Rows;
            } else if (head == "COLUMNS") {
                section = Columns;
            } else if (head == "RHS") {
                section = Rhs;
            } else if (head == "RANGES") {
                section = Ranges;
            } else if (head == "BOUNDS") {
                section = Bounds;
            } else if (head == "ENDATA") {
                section = Done;
                break;
            } else {
                parse_fail(path, lineno, "unknown section '" + head + "'");
            }
            continue;
        }

        switch (section) {
            case Rows: {
                if (toks.size() != 2) parse_fail(path, lineno, "ROWS line needs type and name");
                const std::string& type = toks[0];
                const std::string& name = toks[1];
                if (type == "N") {
                    if (model.obj_name.empty()) model.obj_name = name;
                    // Extra N rows are ignored, as in the reference data sets.
                } else if (type == "E" || type == "L" || type == "G") {
                    if (model.row_index.count(name))
                        parse_fail(path, lineno, "duplicate row '" + name + "'");
                    model.row_index[name] = static_cast<int>(model.row_names.size());
                    model.row_names.push_back(name);
                    model.row_sense.push_back(type == "E"   ? RowSense::Eq
                                              : type == "L" ? RowSense::Le
                                                            : RowSense::Ge);
                } else {
                    parse_fail(path, lineno, "unknown row type '" + type + "'");
                }
                break;
            }
            case Columns: {
                if (toks.size() >= 3 && toks[1] == "'MARKER'")
                    parse_fail(path, lineno, "integer markers are not supported");
                if (toks.size() != 3 && toks.size() != 5)
                    parse_fail(path, lineno, "COLUMNS line needs 1 or 2 (row, value) pairs");
                const std::string& col = toks[0];
                if (!model.col_index.count(col)) {
                    model.col_index[col] = static_cast<int>(model.col_names.size());
                    model.col_names.push_back(col);
                    model.cols.emplace_back();
                }
                const int ci = model.col_index[col];
                for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                    if (k + 1 >= toks.size()) break;
                    const std::string& row = toks[k];
                    const double val = parse_value(toks[k + 1], path, lineno);
                    if (row == model.obj_name) {
                        add_entry(ci, -1, val);
                    } else {
                        auto it = model.row_index.find(row);
                        if (it == model.row_index.end())
                            parse_fail(path, lineno, "unknown row '" + row + "'");
                        add_entry(ci, it->second, val);
                    }
                }
                break;
            }
            case Rhs: {
                if (toks.size() != 3 && toks.size() != 5)
                    parse_fail(path, lineno, "RHS line needs 1 or 2 (row, value) pairs");
                for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                    if (k + 1 >= toks.size()) break;
                    const std::string& row = toks[k];
                    const double val = parse_value(toks[k + 1], path, lineno);
                    if (row == model.obj_name) {
                        // RHS on the objective row encodes the negated constant.
                        model.obj_rhs = val;
                    } else {
                        auto it = model.row_index.find(row);
                        if (it == model.row_index.end())
                            parse_fail(path, lineno, "unknown row '" + row + "'");
                        if (model.rhs.empty())
                            model.rhs.assign(model.row_names.size(), 0.0);
                        model.rhs[it->second] = val;
                    }
                }
                break;
            }
            case Ranges: {
                if (toks.size() != 3 && toks.size() != 5)
                    parse_fail(path, lineno, "RANGES line needs 1 or 2 (row, value) pairs");
                if (model.range.empty())
                    model.range.assign(model.row_names.size(),
                                       std::numeric_limits<double>::quiet_NaN());
                for (size_t k = 1; k + 1 < toks.size(); k += 2) {
                    if (k + 1 >= toks.size()) break;
                    auto it = model.row_index.find(toks[k]);
                    if (it == model.row_index.end())
                        parse_fail(path, lineno, "unknown row '" + toks[k] + "'");
                    model.range[it->second] = parse_value(toks[k + 1], path, lineno);
                }
                break;
            }
            case Bounds: {
                if (toks.size() < 3)
                    parse_fail(path, lineno, "BOUNDS line needs type, set, column");
                const std::string& type = toks[0];
                const std::string& col = toks[2];
                auto it = model.col_index.find(col);
                if (it == model.col_index.end())
                    parse_fail(path, lineno, "unknown column '" + col + "'");
                const int ci = it->second;
                if (model.lower.empty()) {
                    model.lower.assign(model.col_names.size(), 0.0);
                    model.upper.assign(model.col_names.size(), kInf);
                    model.is_free.assign(model.col_names.size(), false);
                }
                auto need_value = [&]() {
                    if (toks.size() < 4) parse_fail(path, lineno, "bound requires a value");
                    return parse_value(toks[3], path, lineno);
                };
                if (type == "UP") {
                    model.upper[ci] = need_value();
                    // Classic convention: a negative upper bound on a
                    // default-lower variable drops the lower bound.
                    if (model.upper[ci] < 0.0 && model.lower[ci] == 0.0)
                        model.lower[ci] = -kInf;
                } else if (type == "LO") {
                    model.lower[ci] = need_value();
                } else if (type == "FX") {
                    const double v = need_value();
                    model.lower[ci] = v;
                    model.upper[ci] = v;
                } else if (type == "FR") {
                    model.lower[ci] = -kInf;
                    model.upper[ci] = kInf;
                    model.is_free[ci] = true;
                } else if (type == "MI") {
                    model.lower[ci] = -kInf;
                } else if (type == "PL") {
                    model.upper[ci] = kInf;
                } else {
                    parse_fail(path, lineno, "unsupported bound type '" + type + "'");
                }
                break;
            }
            case None:
                parse_fail(path, lineno, "data before any section header");
            case Done:
                break;
        }
    }
    if (section != Done) parse_fail(path, lineno, "missing ENDATA");
    if (model.obj_name.empty()) throw ParseError(path + ": no objective (N) row");
    if (model.cols.empty()) throw StructuralError(path + ": empty COLUMNS section");
    if (model.rhs.empty()) model.rhs.assign(model.row_names.size(), 0.0);
    if (model.lower.empty()) {
        model.lower.assign(model.col_names.size(), 0.0);
        model.upper.assign(model.col_names.size(), kInf);
        model.is_free.assign(model.col_names.size(), false);
    }
    return model;
}

ProblemData standardize(const MpsModel& model, const std::string& path, bool prune_rows)
{
    const int nrows = static_cast<int>(model.row_names.size());
    const int ncols = static_cast<int>(model.col_names.size());

    // Row activity bounds [lo, hi] from sense + RANGES (NETLIB convention).
    std::vector<double> row_lo(nrows), row_hi(nrows);
    for (int r = 0; r < nrows; ++r) {
        const double b = model.rhs[r];
        const double rng =
            model.range.empty() ? std::numeric_limits<double>::quiet_NaN() : model.range[r];
        switch (model.row_sense[r]) {
            case RowSense::Eq:
                row_lo[r] = row_hi[r] = b;
                if (!std::isnan(rng)) {
                    if (rng >= 0.0)
                        row_hi[r] = b + rng;
                    else
                        row_lo[r] = b + rng;
                }
                break;
            case RowSense::Le:
                row_hi[r] = b;
                row_lo[r] = std::isnan(rng) ? -kInf : b - std::abs(rng);
                break;
            case RowSense::Ge:
                row_lo[r] = b;
                row_hi[r] = std::isnan(rng) ? kInf : b + std::abs(rng);
                break;
            case RowSense::Objective:
                break;
        }
    }

    // Variable layout: shifted originals (split when the lower bound is -inf),
    // then row slacks, then upper-bound slacks.
    struct VarPlan {
        int pos = -1;       // standard-form column of the (shifted) variable
        int neg = -1;       // second column for split free variables
        double shift = 0.0; // x = shift + x'
        bool mirrored = false;  // x = upper - x'' (lower == -inf, finite upper)
    };
    std::vector<VarPlan> plan(ncols);
    int nstd = 0;
    for (int c = 0; c < ncols; ++c) {
        const double lo = model.lower[c], hi = model.upper[c];
        if (lo > hi) throw StructuralError(path + ": inconsistent bounds on column " +
                                           model.col_names[c]);
        VarPlan& p = plan[c];
        if (std::isinf(lo) && lo < 0.0) {
            if (std::isinf(hi)) {
                p.pos = nstd++;
                p.neg = nstd++;
            } else {
                p.pos = nstd++;
                p.shift = hi;
                p.mirrored = true;
            }
        } else {
            p.pos = nstd++;
            p.shift = lo;
        }
    }

    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    std::vector<double> bvec(nrows, 0.0);
    std::vector<double> cvec;
    cvec.assign(nstd, 0.0);
    double offset = -model.obj_rhs;

    // Base matrix with shifted/split variables.
    for (int c = 0; c < ncols; ++c) {
        const VarPlan& p = plan[c];
        for (const auto& [row, val] : model.cols[c]) {
            const double sgn = p.mirrored ? -1.0 : 1.0;
            if (row < 0) {
                cvec[p.pos] += sgn * val;
                if (p.neg >= 0) cvec[p.neg] -= val;
                offset += val * p.shift;
            } else {
                trips.emplace_back(row, p.pos, sgn * val);
                if (p.neg >= 0) trips.emplace_back(row, p.neg, -val);
                bvec[row] -= val * p.shift;
            }
        }
    }

    // Row slacks: lo <= a.x <= hi becomes a.x + slack = hi, 0 <= slack <= hi-lo.
    std::vector<std::pair<int, double>> slack_caps;  // (column, cap)
    std::vector<double> b_final;
    for (int r = 0; r < nrows; ++r) {
        double target;
        if (row_lo[r] == row_hi[r]) {
            target = row_lo[r] + bvec[r];
        } else if (std::isinf(row_hi[r])) {
            // a.x >= lo: a.x - slack = lo.
            const int sc = nstd++;
            cvec.push_back(0.0);
            trips.emplace_back(r, sc, -1.0);
            target = row_lo[r] + bvec[r];
        } else {
            const int sc = nstd++;
            cvec.push_back(0.0);
            trips.emplace_back(r, sc, 1.0);
            target = row_hi[r] + bvec[r];
            if (!std::isinf(row_lo[r]))
                slack_caps.emplace_back(sc, row_hi[r] - row_lo[r]);
        }
        b_final.push_back(target);
    }

    // Upper bounds on shifted variables and capped slacks: x' + u = cap.
    auto add_cap_row = [&](int col, double cap) {
        const int ur = static_cast<int>(b_final.size());
        const int uc = nstd++;
        cvec.push_back(0.0);
        trips.emplace_back(ur, col, 1.0);
        trips.emplace_back(ur, uc, 1.0);
        b_final.push_back(cap);
    };
    for (int c = 0; c < ncols; ++c) {
        const VarPlan& p = plan[c];
        if (p.neg >= 0 || p.mirrored) continue;  // no finite upper or handled by mirror
        const double hi = model.upper[c];
        if (!std::isinf(hi)) add_cap_row(p.pos, hi - p.shift);
    }
    for (const auto& [col, cap] : slack_caps) add_cap_row(col, cap);

    const int m = static_cast<int>(b_final.size());
    Eigen::SparseMatrix<double> a(m, nstd);
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(b_final.data(), m);
    Eigen::VectorXd c = Eigen::Map<Eigen::VectorXd>(cvec.data(), nstd);

    if (prune_rows) {
        const std::vector<int> dep = dependent_rows(a);
        if (!dep.empty()) {
            std::vector<char> drop(m, 0);
            for (int r : dep) drop[r] = 1;
            std::vector<Trip> kept;
            std::vector<int> newrow(m, -1);
            int mm = 0;
            for (int r = 0; r < m; ++r)
                if (!drop[r]) newrow[r] = mm++;
            for (int k = 0; k < a.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
                    if (newrow[it.row()] >= 0)
                        kept.emplace_back(newrow[it.row()], it.col(), it.value());
            Eigen::VectorXd b2(mm);
            for (int r = 0; r < m; ++r)
                if (newrow[r] >= 0) b2(newrow[r]) = b(r);
            Eigen::SparseMatrix<double> a2(mm, nstd);
            a2.setFromTriplets(kept.begin(), kept.end());
            a = std::move(a2);
            b = std::move(b2);
            std::ostringstream msg;
            msg << path << ": pruned " << dep.size() << " dependent row(s)";
            warn(msg.str());
        }
    }

    const ConeSpec cone = ConeSpec::orthant(nstd);
    return make_problem(cone, std::move(a), std::move(b), riesz_element(cone, c),
                        model.name.empty() ? path : model.name, offset);
}

}  // namespace

ProblemData read_mps(const std::string& path, bool prune_rows)
{
    if (path.size() >= 4) {
        std::string ext = path.substr(path.size() - 4);
        std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
        if (ext == ".qps")
            throw ParseError(path + ": QPS quadratic programs are not supported");
    }
    return standardize(parse_mps_file(path), path, prune_rows);
}

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* field, const std::string& path)
{
    auto it = j.find(field);
    if (it == j.end()) throw ParseError(path + ": missing field '" + std::string(field) + "'");
    return *it;
}

}  // namespace

ProblemData read_conic_json(const std::string& path, bool prune_rows)
{
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }

    const std::string name = j.value("name", path);
    const int m = require_field(j, "m", path).get<int>();

    ConeSpec cone;
    for (const json& blk : require_field(j, "cone", path)) {
        const std::string type = require_field(blk, "type", path).get<std::string>();
        const int dim = require_field(blk, "dim", path).get<int>();
        if (type == "orthant")
            cone.blocks.push_back({BlockKind::Orthant, dim});
        else if (type == "soc")
            cone.blocks.push_back({BlockKind::SecondOrder, dim});
        else if (type == "psd")
            cone.blocks.push_back({BlockKind::Psd, dim});
        else
            throw ParseError(path + ": unknown cone type '" + type + "' in 'cone'");
    }
    try {
        cone.validate();
    } catch (const StructuralError& e) {
        throw ParseError(path + ": field 'cone': " + e.what());
    }
    const int n = cone.ambient_dim();

    const json& ja = require_field(j, "A", path);
    const auto rows = require_field(ja, "rows", path).get<std::vector<int>>();
    const auto cols = require_field(ja, "cols", path).get<std::vector<int>>();
    const auto vals = require_field(ja, "vals", path).get<std::vector<double>>();
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw ParseError(path + ": field 'A': triplet arrays differ in length");
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(rows.size());
    for (size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] < 0 || rows[k] >= m || cols[k] < 0 || cols[k] >= n)
            throw ParseError(path + ": field 'A': triplet index out of range");
        trips.emplace_back(rows[k], cols[k], vals[k]);
    }
    Eigen::SparseMatrix<double> a(m, n);
    a.setFromTriplets(trips.begin(), trips.end());

    const auto bv = require_field(j, "b", path).get<std::vector<double>>();
    const auto cv = require_field(j, "c", path).get<std::vector<double>>();
    if (static_cast<int>(bv.size()) != m)
        throw ParseError(path + ": field 'b': length must equal m");
    if (static_cast<int>(cv.size()) != n)
        throw ParseError(path + ": field 'c': length must equal the cone dimension");
    const double offset = j.value("offset", 0.0);

    if (prune_rows) {
        const std::vector<int> dep = dependent_rows(a);
        if (!dep.empty()) {
            std::vector<char> drop(m, 0);
            for (int r : dep) drop[r] = 1;
            std::vector<Eigen::Triplet<double>> kept;
            std::vector<int> newrow(m, -1);
            int mm = 0;
            for (int r = 0; r < m; ++r)
                if (!drop[r]) newrow[r] = mm++;
            for (int k = 0; k < a.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
                    if (newrow[it.row()] >= 0)
                        kept.emplace_back(newrow[it.row()], it.col(), it.value());
            Eigen::VectorXd b2(mm);
            for (int r = 0; r < m; ++r)
                if (newrow[r] >= 0) b2(newrow[r]) = bv[r];
            Eigen::SparseMatrix<double> a2(mm, n);
            a2.setFromTriplets(kept.begin(), kept.end());
            Eigen::VectorXd c_coeff = Eigen::Map<const Eigen::VectorXd>(cv.data(), n);
            return make_problem(cone, std::move(a2), std::move(b2),
                                riesz_element(cone, c_coeff), name, offset);
        }
    }
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bv.data(), m);
    Eigen::VectorXd c_coeff = Eigen::Map<const Eigen::VectorXd>(cv.data(), n);
    return make_problem(cone, std::move(a), std::move(b), riesz_element(cone, c_coeff),
                        name, offset);
}

void write_conic_json(const ProblemData& prob, const std::string& path)
{
    json j;
    j["name"] = prob.name;
    j["m"] = prob.m();
    json cone_arr = json::array();
    for (const ConeBlock& blk : prob.cone().blocks) {
        const char* type = blk.kind == BlockKind::Orthant      ? "orthant"
                           : blk.kind == BlockKind::SecondOrder ? "soc"
                                                                : "psd";
        cone_arr.push_back({{"type", type}, {"dim", blk.dim}});
    }
    j["cone"] = cone_arr;

    std::vector<int> rows, cols;
    std::vector<double> vals;
    const auto& a = prob.map.matrix();
    for (int k = 0; k < a.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
            rows.push_back(static_cast<int>(it.row()));
            cols.push_back(static_cast<int>(it.col()));
            vals.push_back(it.value());
        }
    j["A"] = {{"rows", rows}, {"cols", cols}, {"vals", vals}};
    j["b"] = std::vector<double>(prob.b.data(), prob.b.data() + prob.b.size());
    const Eigen::VectorXd c_coeff = functional_coords(prob.cone(), prob.c);
    j["c"] = std::vector<double>(c_coeff.data(), c_coeff.data() + c_coeff.size());
    j["offset"] = prob.objective_offset;

    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << j.dump(2) << "\n";
}

LassoSpec make_lasso_spec(Eigen::SparseMatrix<double> d)
{
    Eigen::VectorXd b = Eigen::VectorXd::Ones(d.rows());
    return make_lasso_spec(std::move(d), std::move(b));
}

LassoSpec make_lasso_spec(Eigen::SparseMatrix<double> d, Eigen::VectorXd b)
{
    LassoSpec spec;
    spec.varrho = (Eigen::VectorXd(d.transpose() * b)).lpNorm<Eigen::Infinity>();
    spec.d = std::move(d);
    spec.b = std::move(b);
    if (spec.varrho == 0.0) warn("lasso: D^T b = 0, penalty parameter is zero");
    return spec;
}

ProblemData build_sqrt_lasso(const LassoSpec& spec)
{
    const int rows = static_cast<int>(spec.d.rows());
    const int n = static_cast<int>(spec.d.cols());
    if (rows < 1) throw StructuralError("lasso: D must have at least one row");
    if (spec.d.nonZeros() == 0) warn("lasso: D is the zero matrix");

    ConeSpec cone;
    cone.blocks.push_back({BlockKind::SecondOrder, rows + 1});
    if (n > 0) cone.blocks.push_back({BlockKind::Orthant, 2 * n});

    // Variable order (t, d, y+, y-); constraints D y+ - D y- - d = b.
    std::vector<Eigen::Triplet<double>> trips;
    for (int r = 0; r < rows; ++r) trips.emplace_back(r, 1 + r, -1.0);
    for (int k = 0; k < spec.d.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(spec.d, k); it; ++it) {
            trips.emplace_back(it.row(), 1 + rows + static_cast<int>(it.col()), it.value());
            trips.emplace_back(it.row(), 1 + rows + n + static_cast<int>(it.col()),
                               -it.value());
        }
    Eigen::SparseMatrix<double> a(rows, 1 + rows + 2 * n);
    a.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd c_coeff = Eigen::VectorXd::Zero(1 + rows + 2 * n);
    c_coeff(0) = 1.0;
    c_coeff.tail(2 * n).setConstant(spec.varrho);

    return make_problem(cone, std::move(a), spec.b, riesz_element(cone, c_coeff),
                        "sqrt-lasso");
}

Eigen::VectorXd sqrt_lasso_recover(const LassoSpec& spec, const Element& x)
{
    const int n = static_cast<int>(spec.d.cols());
    if (n == 0) return Eigen::VectorXd();
    const Eigen::VectorXd& yy = x.blocks[1].v;
    return yy.head(n) - yy.tail(n);
}

double sqrt_lasso_objective(const LassoSpec& spec, const Eigen::VectorXd& y)
{
    const Eigen::VectorXd r = spec.d * y - spec.b;
    return r.norm() + spec.varrho * y.lpNorm<1>();
}

double sqrt_lasso_subgradient_violation(const LassoSpec& spec, const Eigen::VectorXd& y,
                                        double zero_tol)
{
    const Eigen::VectorXd r = spec.d * y - spec.b;
    const double rn = r.norm();
    Eigen::VectorXd g;
    if (rn > zero_tol) {
        g = Eigen::VectorXd(spec.d.transpose() * r) / rn;
    } else {
        // Residual at zero: any subgradient D^T u with ||u|| <= 1 works, so the
        // condition degenerates to |g_i| <= varrho with g minimizing the norm;
        // use the least-squares choice u = 0.
        g = Eigen::VectorXd::Zero(spec.d.cols());
    }
    double viol = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        if (std::abs(y(i)) > zero_tol) {
            viol = std::max(viol, std::abs(g(i) + spec.varrho * (y(i) > 0 ? 1.0 : -1.0)));
        } else {
            viol = std::max(viol, std::max(0.0, std::abs(g(i)) - spec.varrho));
        }
    }
    return viol;
}

Eigen::SparseMatrix<double> read_matrix_market(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    auto banner = tokenize(line);
    for (auto& t : banner) std::transform(t.begin(), t.end(), t.begin(), ::tolower);
    if (banner.size() < 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix" ||
        banner[2] != "coordinate" || banner[3] != "real" ||
        (banner[4] != "general" && banner[4] != "symmetric"))
        throw ParseError(path + ": expected banner '%%MatrixMarket matrix coordinate real "
                                "general|symmetric'");
    const bool symmetric = banner[4] == "symmetric";

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] != '%') break;
    }
    auto dims = tokenize(line);
    if (dims.size() != 3) parse_fail(path, lineno, "expected 'rows cols nnz'");
    const int rows = static_cast<int>(parse_value(dims[0], path, lineno));
    const int cols = static_cast<int>(parse_value(dims[1], path, lineno));
    const long nnz = static_cast<long>(parse_value(dims[2], path, lineno));

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(nnz));
    for (long k = 0; k < nnz; ++k) {
        if (!std::getline(in, line)) parse_fail(path, lineno + 1, "unexpected end of file");
        ++lineno;
        auto toks = tokenize(line);
        if (toks.size() != 3) parse_fail(path, lineno, "expected 'i j value'");
        const int i = static_cast<int>(parse_value(toks[0], path, lineno));
        const int jj = static_cast<int>(parse_value(toks[1], path, lineno));
        const double v = parse_value(toks[2], path, lineno);
        if (i < 1 || i > rows || jj < 1 || jj > cols) {
            std::ostringstream msg;
            msg << "entry " << (k + 1) << " index (" << i << ", " << jj
                << ") outside " << rows << " x " << cols;
            parse_fail(path, lineno, msg.str());
        }
        trips.emplace_back(i - 1, jj - 1, v);
        if (symmetric && i != jj) trips.emplace_back(jj - 1, i - 1, v);
    }
    Eigen::SparseMatrix<double> out(rows, cols);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

}  // namespace conewton
