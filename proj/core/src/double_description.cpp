#include "tcmax/double_description.hpp"

#include <boost/dynamic_bitset.hpp>

namespace tcmax {

Matrix ConeGenerators::all() const {
    Matrix out;
    out.reserve(2 * lineality.size() + rays.size());
    for (const auto& l : lineality) out.push_back(l);
    for (const auto& l : lineality) out.push_back(negated(l));
    for (const auto& r : rays) out.push_back(r);
    return out;
}

namespace {

struct Ray {
    Vector v;
    boost::dynamic_bitset<> active;
};

void normalize(Vector& v) {
    if (!is_zero(v)) v = primitive(v);
}

class DoubleDescription {
public:
    explicit DoubleDescription(std::size_t dim) : dim_(dim) {
        for (std::size_t i = 0; i < dim; ++i) lin_.push_back(unit_vector(dim, i));
    }

    void add_inequality(const Vector& a) {
        const std::size_t k = processed_++;
        for (auto& r : rays_) r.active.resize(processed_);

        std::size_t pick = lin_.size();
        Rational al0;
        for (std::size_t i = 0; i < lin_.size(); ++i) {
            al0 = dot(a, lin_[i]);
            if (!al0.is_zero()) {
                pick = i;
                break;
            }
        }
        if (pick < lin_.size()) {
            Vector l0 = lin_[pick];
            if (al0 > 0) {
                l0 = negated(l0);
                al0 = -al0;
            }
            lin_.erase(lin_.begin() + static_cast<std::ptrdiff_t>(pick));
            for (auto& l : lin_) project(l, a, l0, al0);
            for (auto& r : rays_) {
                project(r.v, a, l0, al0);
                normalize(r.v);
                r.active.set(k);
            }
            for (auto& l : lin_) normalize(l);
            Ray nr{l0, boost::dynamic_bitset<>(processed_)};
            nr.active.set();
            nr.active.reset(k);
            normalize(nr.v);
            rays_.push_back(std::move(nr));
            return;
        }

        std::vector<Rational> val(rays_.size());
        std::vector<std::size_t> pos, neg;
        std::vector<Ray> next;
        for (std::size_t i = 0; i < rays_.size(); ++i) {
            val[i] = dot(a, rays_[i].v);
            if (val[i] > 0) {
                pos.push_back(i);
            } else {
                if (val[i].is_zero()) {
                    rays_[i].active.set(k);
                } else {
                    neg.push_back(i);
                }
                next.push_back(rays_[i]);
            }
        }
        for (auto p : pos) {
            for (auto n : neg) {
                if (!adjacent(p, n)) continue;
                Vector v(dim_, Rational(0));
                axpy(val[p], rays_[n].v, v);
                axpy(-val[n], rays_[p].v, v);
                normalize(v);
                Ray nr{std::move(v), rays_[p].active & rays_[n].active};
                nr.active.set(k);
                next.push_back(std::move(nr));
            }
        }
        rays_ = std::move(next);
    }

    ConeGenerators result() const {
        ConeGenerators out;
        out.lineality = span_basis(lin_, dim_);
        for (auto& l : out.lineality) normalize(l);
        for (const auto& r : rays_) out.rays.push_back(r.v);
        return out;
    }

private:
    static void project(Vector& x, const Vector& a, const Vector& l0, const Rational& al0) {
        const Rational ax = dot(a, x);
        if (ax.is_zero()) return;
        axpy(-ax / al0, l0, x);
    }

    bool adjacent(std::size_t p, std::size_t n) const {
        const auto common = rays_[p].active & rays_[n].active;
        for (std::size_t i = 0; i < rays_.size(); ++i) {
            if (i == p || i == n) continue;
            if (common.is_subset_of(rays_[i].active)) return false;
        }
        return true;
    }

    std::size_t dim_;
    std::size_t processed_ = 0;
    Matrix lin_;
    std::vector<Ray> rays_;
};

} // namespace

ConeGenerators double_description(const Matrix& ineq, const Matrix& eq, std::size_t dim) {
    DoubleDescription dd(dim);
    for (const auto& e : eq) {
        if (e.size() != dim) throw std::invalid_argument("double_description: dimension mismatch");
        dd.add_inequality(e);
        dd.add_inequality(negated(e));
    }
    for (const auto& a : ineq) {
        if (a.size() != dim) throw std::invalid_argument("double_description: dimension mismatch");
        if (is_zero(a)) continue;
        dd.add_inequality(a);
    }
    return dd.result();
}

ConeGenerators polar_generators(const Matrix& generators, std::size_t dim) {
    return double_description(generators, {}, dim);
}

ConeGenerators intersect_with_subspace(const Matrix& generators, const Matrix& eq, std::size_t dim) {
    const auto facets = polar_generators(generators, dim);
    Matrix equalities = facets.lineality;
    for (const auto& e : eq) equalities.push_back(e);
    return double_description(facets.rays, equalities, dim);
}

} // namespace tcmax
