#include "einsel/infotheory.hpp"

#include <cmath>
#include <stdexcept>

namespace einsel {

namespace {
constexpr double kEigenFloor = 1e-14;
constexpr double kWeightTol = 1e-12;
}  // namespace

double entropy(const DensityMatrix& rho) {
    double s = 0.0;
    const Eigen::VectorXd& ev = rho.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) >= kEigenFloor) s -= ev(i) * std::log(ev(i));
    return s;
}

double info_total(const DensityMatrix& rho) {
    return std::log(static_cast<double>(rho.dim())) - entropy(rho);
}

namespace {

template <typename Source>
InfoReport report_from(const Source& src, double total, const Partition& partition) {
    InfoReport out{total, {}, 0.0, 0.0, partition};
    for (const auto& block : partition.blocks())
        out.per_block.push_back(info_total(partial_trace(src, block)));
    for (double v : out.per_block) out.aggregate += v;
    out.correlation = out.total - out.aggregate;
    return out;
}

}  // namespace

InfoReport info_report(const DensityMatrix& rho, const Partition& partition) {
    return report_from(rho, info_total(rho), partition);
}

InfoReport info_report(const PureState& psi, const Partition& partition) {
    return report_from(psi, std::log(static_cast<double>(psi.dim())), partition);
}

double info_conservation_check(const HermitianOperator& h, const PureState& psi0,
                               const std::vector<double>& t_samples) {
    const double i0 = info_total(outer(psi0));
    double dev = 0.0;
    for (double t : t_samples) {
        const double it = info_total(outer(evolve_exact(h, t, psi0)));
        dev = std::max(dev, std::abs(it - i0));
    }
    return dev;
}

Preparation::Preparation(std::vector<std::pair<double, PureState>> components_)
    : components(std::move(components_)) {
    if (components.empty()) throw std::invalid_argument("preparation: no components");
    double sum = 0.0;
    for (const auto& [w, psi] : components) {
        if (w < 0.0) throw std::invalid_argument("preparation: negative weight");
        if (!psi.reg().same_layout(components.front().second.reg()))
            throw std::invalid_argument("preparation: components must share a register");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightTol)
        throw std::invalid_argument("preparation: weights must sum to 1");
}

DensityMatrix ensemble_density(const Preparation& prep) {
    const Register& reg = prep.components.front().second.reg();
    const Eigen::Index d = static_cast<Eigen::Index>(reg.dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& [w, psi] : prep.components)
        m += w * (psi.amplitudes() * psi.amplitudes().adjoint());
    return DensityMatrix(reg, std::move(m));
}

}  // namespace einsel
