#include "rgw/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <utility>

#include <Eigen/Eigenvalues>

#include "rgw/errors.hpp"

namespace rgw::quad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK dqk21).
constexpr double kXgk[11] = {0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
                             0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
                             0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
                             0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
                             0.294392862701460198131126603103866, 0.14887433898163121088482600112972,
                             0.0};
constexpr double kWgk[11] = {0.011694638867371874278064396062192, 0.03255816230796472747881897245939,
                             0.05475589657435199603138130024458,  0.07503967481091995276704314091619,
                             0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
                             0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
                             0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
                             0.149445554002916905664936468389821};
constexpr double kWg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                           0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                           0.295524224714752870173892994651338};

constexpr int kTailLow = 20;
constexpr int kTailHigh = 40;

Rule build_gauss_jacobi(int n, double alpha) {
    // Jacobi weight (1-x)^alpha (1+x)^0 on [-1, 1]; three-term recurrence for Golub-Welsch.
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    diag(0) = -alpha / (alpha + 2.0);
    for (int k = 1; k < n; ++k) {
        double s = 2.0 * k + alpha;
        diag(k) = -alpha * alpha / (s * (s + 2.0));
        sub(k - 1) = 2.0 * k * (k + alpha) / (s * std::sqrt(s * s - 1.0));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericError("Golub-Welsch eigen-decomposition failed");
    Rule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    // On [0,1] the weight (1-u)^alpha has total mass 1/(alpha+1).
    for (int i = 0; i < n; ++i) {
        double v0 = es.eigenvectors()(0, i);
        r.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 + es.eigenvalues()(i));
        r.weights[static_cast<std::size_t>(i)] = v0 * v0 / (alpha + 1.0);
    }
    return r;
}

struct Piece {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
    bool tail = false;
};

struct ByError {
    bool operator()(const Piece& x, const Piece& y) const { return x.error < y.error; }
};

} // namespace

const Rule& gauss_jacobi_unit(int n, double alpha) {
    if (n < 1) throw ContractError("Gauss-Jacobi rule needs at least one node");
    if (!(alpha > -1.0)) throw ContractError("Gauss-Jacobi exponent must exceed -1");
    thread_local std::map<std::pair<int, double>, Rule> cache;
    auto key = std::make_pair(n, alpha);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (cache.size() > 256) cache.clear();
    return cache.emplace(key, build_gauss_jacobi(n, alpha)).first->second;
}

Result gauss_kronrod21(const std::function<double(double)>& f, double a, double b) {
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double dhlgth = std::abs(hlgth);

    double fv1[10];
    double fv2[10];
    const double fc = f(centr);
    double resg = 0.0;
    double resk = kWgk[10] * fc;
    double resabs = std::abs(resk);
    for (int j = 0; j < 5; ++j) {
        int jtw = 2 * j + 1;
        double absc = hlgth * kXgk[jtw];
        double f1 = f(centr - absc);
        double f2 = f(centr + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += kWg[j] * (f1 + f2);
        resk += kWgk[jtw] * (f1 + f2);
        resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
    }
    for (int j = 0; j < 5; ++j) {
        int jtwm1 = 2 * j;
        double absc = hlgth * kXgk[jtwm1];
        double f1 = f(centr - absc);
        double f2 = f(centr + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += kWgk[jtwm1] * (f1 + f2);
        resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    Result r;
    r.value = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    double abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) abserr = std::max(kEps * 50.0 * resabs, abserr);
    r.abs_error = abserr;
    r.evaluations = 21;
    r.converged = true;
    return r;
}

Result integrate_endpoint_weighted(const std::function<double(double)>& f, double alpha, const Options& opt) {
    if (!(alpha > -1.0)) throw ContractError("endpoint exponent must exceed -1");
    if (!(opt.tail_fraction > 0.0 && opt.tail_fraction < 1.0)) throw ContractError("tail_fraction must lie in (0,1)");

    std::function<double(double)> weighted = [&](double s) {
        double w = 1.0 - s;
        return (w <= 0.0 ? (alpha == 0.0 ? 1.0 : 0.0) : std::pow(w, alpha)) * f(s);
    };

    Result total;
    auto gk_piece = [&](double a, double b) {
        Result r = gauss_kronrod21(weighted, a, b);
        total.evaluations += r.evaluations;
        return Piece{a, b, r.value, r.abs_error, false};
    };
    auto tail_piece = [&](double a) {
        // (1-s)^alpha f(s) on [a,1] = (1-a)^(alpha+1) * int_0^1 (1-u)^alpha f(a + (1-a)u) du.
        const double width = 1.0 - a;
        const double scale = std::pow(width, alpha + 1.0);
        auto apply = [&](const Rule& rule) {
            double s = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(a + width * rule.nodes[i]);
            return s * scale;
        };
        double lo = apply(gauss_jacobi_unit(kTailLow, alpha));
        double hi = apply(gauss_jacobi_unit(kTailHigh, alpha));
        total.evaluations += kTailLow + kTailHigh;
        return Piece{a, 1.0, hi, std::abs(hi - lo) + 50.0 * kEps * std::abs(hi), true};
    };

    std::priority_queue<Piece, std::vector<Piece>, ByError> heap;
    if (opt.jacobi_endpoint) {
        double split = 1.0 - opt.tail_fraction;
        heap.push(gk_piece(0.0, split));
        heap.push(tail_piece(split));
    } else {
        heap.push(gk_piece(0.0, 1.0));
    }

    auto sums = [&]() {
        auto copy = heap;
        double v = 0.0;
        double e = 0.0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return std::make_pair(v, e);
    };

    double value = 0.0;
    double error = 0.0;
    // Running sums are recomputed from scratch periodically to keep drift out of the stopping test.
    {
        auto [v, e] = sums();
        value = v;
        error = e;
    }
    while (true) {
        double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
        if (error <= target) {
            total.converged = true;
            break;
        }
        if (total.subdivisions >= opt.max_subdivisions) break;
        Piece worst = heap.top();
        heap.pop();
        value -= worst.value;
        error -= worst.error;
        Piece left;
        Piece right;
        if (worst.tail) {
            double mid = 0.5 * (worst.a + 1.0);
            if (!(mid > worst.a && mid < 1.0)) {
                heap.push(worst);
                break;
            }
            left = gk_piece(worst.a, mid);
            right = tail_piece(mid);
        } else {
            double mid = 0.5 * (worst.a + worst.b);
            if (!(mid > worst.a && mid < worst.b)) {
                heap.push(worst);
                break;
            }
            left = gk_piece(worst.a, mid);
            right = gk_piece(mid, worst.b);
        }
        value += left.value + right.value;
        error += left.error + right.error;
        heap.push(left);
        heap.push(right);
        ++total.subdivisions;
        if (total.subdivisions % 64 == 0) {
            auto [v, e] = sums();
            value = v;
            error = e;
        }
    }
    auto [v, e] = sums();
    total.value = v;
    total.abs_error = e;
    if (!total.converged) total.converged = e <= std::max(opt.abs_tol, opt.rel_tol * std::abs(v));
    return total;
}

} // namespace rgw::quad
