#include "couplerlab/fock.hpp"

#include <stdexcept>

namespace couplerlab {

int total_dim(const Layout& layout) {
    int d = 1;
    for (const auto& m : layout) {
        if (m.levels < 2) throw std::invalid_argument("mode '" + m.label + "': levels must be >= 2");
        d *= m.levels;
    }
    return d;
}

int index_of(const BasisLabel& label, const Layout& layout) {
    if (label.size() != layout.size())
        throw std::invalid_argument("label length does not match layout");
    int idx = 0;
    for (size_t k = 0; k < layout.size(); ++k) {
        if (label[k] < 0 || label[k] >= layout[k].levels)
            throw std::invalid_argument("occupation out of range for mode '" + layout[k].label + "'");
        idx = idx * layout[k].levels + label[k];
    }
    return idx;
}

BasisLabel label_of(int index, const Layout& layout) {
    if (index < 0 || index >= total_dim(layout))
        throw std::invalid_argument("basis index out of range");
    BasisLabel label(layout.size());
    for (size_t k = layout.size(); k-- > 0;) {
        label[k] = index % layout[k].levels;
        index /= layout[k].levels;
    }
    return label;
}

std::vector<BasisLabel> enumerate_basis(const Layout& layout) {
    const int dim = total_dim(layout);
    std::vector<BasisLabel> basis;
    basis.reserve(dim);
    for (int i = 0; i < dim; ++i) basis.push_back(label_of(i, layout));
    return basis;
}

Eigen::MatrixXd ladder_real(int levels) {
    if (levels < 2) throw std::invalid_argument("ladder: levels must be >= 2");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

OperatorMatrix ladder(const ModeSpec& mode) {
    OperatorMatrix op;
    op.m = ladder_real(mode.levels).cast<std::complex<double>>();
    op.basis.reserve(mode.levels);
    for (int n = 0; n < mode.levels; ++n) op.basis.push_back({n});
    return op;
}

namespace {

// Strides for placing a single-slot operator: index = (pre*levels + mid)*post_dim + post.
struct SlotStrides {
    int pre_dim, levels, post_dim;
};

SlotStrides slot_strides(int slot, const Layout& layout) {
    if (slot < 0 || slot >= static_cast<int>(layout.size()))
        throw std::invalid_argument("lift: slot out of range");
    SlotStrides s{1, layout[slot].levels, 1};
    for (int k = 0; k < slot; ++k) s.pre_dim *= layout[k].levels;
    for (size_t k = slot + 1; k < layout.size(); ++k) s.post_dim *= layout[k].levels;
    return s;
}

template <typename Mat>
Mat lift_impl(const Mat& op, int slot, const Layout& layout) {
    const auto s = slot_strides(slot, layout);
    if (op.rows() != s.levels || op.cols() != s.levels)
        throw std::invalid_argument("lift: operator dimension does not match the slot's levels");
    const int dim = s.pre_dim * s.levels * s.post_dim;
    Mat out = Mat::Zero(dim, dim);
    for (int pre = 0; pre < s.pre_dim; ++pre)
        for (int i = 0; i < s.levels; ++i)
            for (int j = 0; j < s.levels; ++j) {
                if (op(i, j) == typename Mat::Scalar(0)) continue;
                const int row0 = (pre * s.levels + i) * s.post_dim;
                const int col0 = (pre * s.levels + j) * s.post_dim;
                for (int post = 0; post < s.post_dim; ++post)
                    out(row0 + post, col0 + post) = op(i, j);
            }
    return out;
}

}  // namespace

Eigen::MatrixXd lift_real(const Eigen::MatrixXd& op, int slot, const Layout& layout) {
    return lift_impl(op, slot, layout);
}

OperatorMatrix lift(const OperatorMatrix& op, int slot, const Layout& layout) {
    OperatorMatrix out;
    out.m = lift_impl(op.m, slot, layout);
    out.basis = enumerate_basis(layout);
    return out;
}

}  // namespace couplerlab
