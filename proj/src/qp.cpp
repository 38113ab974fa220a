#include "qp.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace netflow {

namespace {
constexpr double kTol = 1e-11;
}

QPResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& A,
                      const Eigen::VectorXd& b, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                      const Eigen::VectorXd& x0) {
    const int n = static_cast<int>(H.rows());
    const int m = static_cast<int>(A.rows());

    Eigen::VectorXd x = x0;
    for (int i = 0; i < n; ++i) x(i) = std::clamp(x(i), lo(i), hi(i));

    // working set: -1 free, 0 at lower, 1 at upper; fixed variables (lo==hi) stay pinned
    std::vector<int> ws(n, -1);
    for (int i = 0; i < n; ++i) {
        if (hi(i) - lo(i) < kTol) ws[i] = 2;  // permanently fixed
        else if (x(i) <= lo(i) + kTol) ws[i] = 0;
        else if (x(i) >= hi(i) - kTol) ws[i] = 1;
    }

    QPResult res;
    res.unique = true;
    const int max_iter = 40 * (n + 1) + 100;
    for (int iter = 0; iter < max_iter; ++iter) {
        res.iterations = iter + 1;
        std::vector<int> freev;
        for (int i = 0; i < n; ++i)
            if (ws[i] < 0) freev.push_back(i);
        const int nf = static_cast<int>(freev.size());

        // KKT system on free variables
        Eigen::VectorXd grad = H * x + g;
        Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
        if (nf > 0) {
            Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nf + m, nf + m);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + m);
            for (int a = 0; a < nf; ++a) {
                for (int c = 0; c < nf; ++c) K(a, c) = H(freev[a], freev[c]);
                for (int r = 0; r < m; ++r) {
                    K(a, nf + r) = A(r, freev[a]);
                    K(nf + r, a) = A(r, freev[a]);
                }
                rhs(a) = -grad(freev[a]);
            }
            Eigen::VectorXd eqres = b - A * x;
            for (int r = 0; r < m; ++r) rhs(nf + r) = eqres(r);

            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
            Eigen::VectorXd sol = cod.solve(rhs);
            if (cod.rank() < K.rows()) {
                double resid = (K * sol - rhs).norm();
                if (resid > 1e-8 * (1.0 + rhs.norm()))
                    throw numeric_error("qp: inconsistent KKT system");
            }
            for (int a = 0; a < nf; ++a) p(freev[a]) = sol(a);
            lambda = sol.tail(m);
        } else {
            // no free variables: multipliers from least squares on the full gradient
            if (m > 0) lambda = A.transpose().colPivHouseholderQr().solve(grad).eval() * -1.0;
        }

        if (p.lpNorm<Eigen::Infinity>() > kTol) {
            // line search to the nearest bound
            double alpha = 1.0;
            int blocking = -1, side = 0;
            for (int i = 0; i < n; ++i) {
                if (ws[i] >= 0 || std::abs(p(i)) < kTol) continue;
                if (p(i) > 0 && x(i) + alpha * p(i) > hi(i)) {
                    alpha = (hi(i) - x(i)) / p(i);
                    blocking = i;
                    side = 1;
                } else if (p(i) < 0 && x(i) + alpha * p(i) < lo(i)) {
                    alpha = (lo(i) - x(i)) / p(i);
                    blocking = i;
                    side = 0;
                }
            }
            alpha = std::clamp(alpha, 0.0, 1.0);
            x += alpha * p;
            if (blocking >= 0) {
                ws[blocking] = side;
                x(blocking) = side == 0 ? lo(blocking) : hi(blocking);
                continue;
            }
            // full step taken; loop once more to verify optimality
            continue;
        }

        // stationary on the working set: check bound multipliers
        grad = H * x + g;
        Eigen::VectorXd mult = grad + A.transpose() * lambda;
        int release = -1;
        double worst = kTol * 10;
        for (int i = 0; i < n; ++i) {
            if (ws[i] == 0) {  // at lower bound: multiplier must be >= 0 -> mult(i) >= 0
                if (mult(i) < -worst) {
                    worst = -mult(i);
                    release = i;
                }
            } else if (ws[i] == 1) {  // at upper bound: mult(i) <= 0
                if (mult(i) > worst) {
                    worst = mult(i);
                    release = i;
                }
            }
        }
        if (release < 0) {
            res.x = x;
            res.objective = 0.5 * x.dot(H * x) + g.dot(x);
            for (int i = 0; i < n; ++i) {
                if (ws[i] == 0 || ws[i] == 2) res.active_lo.push_back(i);
                if (ws[i] == 1) res.active_hi.push_back(i);
            }
            // uniqueness: reduced Hessian on the null space of all active constraints
            std::vector<int> freev2;
            for (int i = 0; i < n; ++i)
                if (ws[i] < 0) freev2.push_back(i);
            int nf2 = static_cast<int>(freev2.size());
            if (nf2 > 0) {
                Eigen::MatrixXd Af(m, nf2);
                Eigen::MatrixXd Hf(nf2, nf2);
                for (int a = 0; a < nf2; ++a) {
                    for (int r = 0; r < m; ++r) Af(r, a) = A(r, freev2[a]);
                    for (int c = 0; c < nf2; ++c) Hf(a, c) = H(freev2[a], freev2[c]);
                }
                Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> codA(Af);
                int null_dim = nf2 - static_cast<int>(codA.rank());
                if (null_dim > 0) {
                    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Af, Eigen::ComputeFullV);
                    Eigen::MatrixXd Z = svd.matrixV().rightCols(null_dim);
                    Eigen::MatrixXd Hr = Z.transpose() * Hf * Z;
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hr);
                    double scale = std::max(1.0, Hf.cwiseAbs().maxCoeff());
                    if (es.eigenvalues().minCoeff() < 1e-10 * scale) res.unique = false;
                }
            }
            return res;
        }
        ws[release] = -1;
    }
    throw numeric_error("qp: active-set iteration limit exceeded");
}

FeasibleSet find_feasible_box(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double tol) {
    FeasibleSet fs;
    const int n = static_cast<int>(A.cols());

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    Eigen::VectorXd xp = cod.solve(b);
    if ((A * xp - b).norm() > 1e-9 * (1.0 + b.norm())) return fs;  // inconsistent equalities

    Eigen::MatrixXd N;
    int rank = static_cast<int>(cod.rank());
    int dim = n - rank;
    if (dim > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
        N = svd.matrixV().rightCols(dim);
    } else {
        N = Eigen::MatrixXd::Zero(n, 0);
    }

    if (dim == 0) {
        for (int i = 0; i < n; ++i)
            if (xp(i) < lo(i) - tol || xp(i) > hi(i) + tol) return fs;
        fs.feasible = true;
        fs.x0 = xp;
        fs.basis = N;
        fs.dim = 0;
        return fs;
    }

    if (dim == 1) {
        Eigen::VectorXd v = N.col(0);
        double tlo = -1e300, thi = 1e300;
        for (int i = 0; i < n; ++i) {
            if (std::abs(v(i)) < 1e-14) {
                if (xp(i) < lo(i) - tol || xp(i) > hi(i) + tol) return fs;
                continue;
            }
            double a = (lo(i) - xp(i)) / v(i);
            double c = (hi(i) - xp(i)) / v(i);
            if (a > c) std::swap(a, c);
            tlo = std::max(tlo, a);
            thi = std::min(thi, c);
        }
        if (tlo > thi + tol) return fs;
        double t = 0.5 * (tlo + thi);
        fs.feasible = true;
        fs.x0 = xp + t * v;
        fs.basis = N;
        fs.dim = 1;
        return fs;
    }

    // dim == 2: clip the box halfplanes against a large square in (t1, t2)
    struct P2 { double t1, t2; };
    double big = 0.0;
    for (int i = 0; i < n; ++i) big = std::max({big, std::abs(lo(i)), std::abs(hi(i)), std::abs(xp(i))});
    big = 10 * (big + 1.0);
    std::vector<P2> poly = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
    auto clip = [&](double a1, double a2, double c) {
        // keep a1*t1 + a2*t2 <= c
        std::vector<P2> out;
        int sz = static_cast<int>(poly.size());
        for (int k = 0; k < sz; ++k) {
            P2 p = poly[k], q = poly[(k + 1) % sz];
            double fp = a1 * p.t1 + a2 * p.t2 - c;
            double fq = a1 * q.t1 + a2 * q.t2 - c;
            if (fp <= tol) out.push_back(p);
            if ((fp < -tol && fq > tol) || (fp > tol && fq < -tol)) {
                double w = fp / (fp - fq);
                out.push_back({p.t1 + w * (q.t1 - p.t1), p.t2 + w * (q.t2 - p.t2)});
            }
        }
        poly = out;
    };
    for (int i = 0; i < n && !poly.empty(); ++i) {
        clip(N(i, 0), N(i, 1), hi(i) - xp(i));
        if (poly.empty()) break;
        clip(-N(i, 0), -N(i, 1), xp(i) - lo(i));
    }
    if (poly.empty()) return fs;
    double c1 = 0, c2 = 0;
    for (auto& p : poly) {
        c1 += p.t1;
        c2 += p.t2;
    }
    c1 /= poly.size();
    c2 /= poly.size();
    fs.feasible = true;
    fs.x0 = xp + N.col(0) * c1 + N.col(1) * c2;
    fs.basis = N;
    fs.dim = 2;
    return fs;
}

std::pair<double, double> coordinate_range(const FeasibleSet& fs, const Eigen::VectorXd& lo,
                                           const Eigen::VectorXd& hi, int coord) {
    const int n = static_cast<int>(lo.size());
    if (fs.dim == 0) return {fs.x0(coord), fs.x0(coord)};
    if (fs.dim == 1) {
        Eigen::VectorXd v = fs.basis.col(0);
        double tlo = -1e300, thi = 1e300;
        for (int i = 0; i < n; ++i) {
            if (std::abs(v(i)) < 1e-14) continue;
            double a = (lo(i) - fs.x0(i)) / v(i);
            double c = (hi(i) - fs.x0(i)) / v(i);
            if (a > c) std::swap(a, c);
            tlo = std::max(tlo, a);
            thi = std::min(thi, c);
        }
        double va = fs.x0(coord) + tlo * v(coord);
        double vb = fs.x0(coord) + thi * v(coord);
        return {std::min(va, vb), std::max(va, vb)};
    }
    // dim 2: vertex enumeration of the feasible polygon in null-space coordinates
    struct P2 { double t1, t2; };
    double big = 0.0;
    for (int i = 0; i < n; ++i) big = std::max({big, std::abs(lo(i)), std::abs(hi(i)), std::abs(fs.x0(i))});
    big = 10 * (big + 1.0);
    std::vector<P2> poly = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
    auto clip = [&](double a1, double a2, double c) {
        std::vector<P2> out;
        int sz = static_cast<int>(poly.size());
        for (int k = 0; k < sz; ++k) {
            P2 p = poly[k], q = poly[(k + 1) % sz];
            double fp = a1 * p.t1 + a2 * p.t2 - c;
            double fq = a1 * q.t1 + a2 * q.t2 - c;
            if (fp <= 1e-12) out.push_back(p);
            if ((fp < -1e-12 && fq > 1e-12) || (fp > 1e-12 && fq < -1e-12)) {
                double w = fp / (fp - fq);
                out.push_back({p.t1 + w * (q.t1 - p.t1), p.t2 + w * (q.t2 - p.t2)});
            }
        }
        poly = out;
    };
    for (int i = 0; i < n && !poly.empty(); ++i) {
        clip(fs.basis(i, 0), fs.basis(i, 1), hi(i) - fs.x0(i));
        if (poly.empty()) break;
        clip(-fs.basis(i, 0), -fs.basis(i, 1), fs.x0(i) - lo(i));
    }
    double mn = 1e300, mx = -1e300;
    for (auto& p : poly) {
        double v = fs.x0(coord) + fs.basis(coord, 0) * p.t1 + fs.basis(coord, 1) * p.t2;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    if (poly.empty()) return {fs.x0(coord), fs.x0(coord)};
    return {mn, mx};
}

} // namespace netflow
