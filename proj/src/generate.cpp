#include "mahi/generate.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "mahi/error.hpp"

namespace mahi {

SiteDistribution parse_distribution(const std::string& text) {
    if (text == "typical") return SiteDistribution::typical;
    if (text == "worst" || text == "worst-case") return SiteDistribution::worst;
    throw InputError("unknown site distribution '" + text + "' (expected typical or worst)");
}

const char* distribution_name(SiteDistribution d) { return d == SiteDistribution::typical ? "typical" : "worst"; }

namespace {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}
    // [0, 1) with 53 random bits; std distributions are not portable
    double uniform() { return double(rng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 rng_;
};

// Periodic cell grid for the minimum-distance test.
class Grid {
public:
    Grid(double box, double cutoff) : box_(box), cut2_(cutoff * cutoff) {
        n_ = std::max(1, int(std::floor(box / cutoff)));
        cells_.resize(std::size_t(n_) * n_ * n_);
    }
    bool free(const Vec3& r, const std::vector<Vec3>& pts) const {
        if (n_ < 3) return scan_all(r, pts);
        int cx, cy, cz;
        cell(r, cx, cy, cz);
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    for (int j : cells_[index(cx + dx, cy + dy, cz + dz)]) {
                        Vec3 d = r - pts[j];
                        d.x -= box_ * std::round(d.x / box_);
                        d.y -= box_ * std::round(d.y / box_);
                        d.z -= box_ * std::round(d.z / box_);
                        if (norm2(d) < cut2_) return false;
                    }
        return true;
    }
    void insert(const Vec3& r, int i) {
        int cx, cy, cz;
        cell(r, cx, cy, cz);
        cells_[index(cx, cy, cz)].push_back(i);
    }

private:
    bool scan_all(const Vec3& r, const std::vector<Vec3>& pts) const {
        for (const auto& p : pts) {
            Vec3 d = r - p;
            d.x -= box_ * std::round(d.x / box_);
            d.y -= box_ * std::round(d.y / box_);
            d.z -= box_ * std::round(d.z / box_);
            if (norm2(d) < cut2_) return false;
        }
        return true;
    }
    void cell(const Vec3& r, int& x, int& y, int& z) const {
        x = std::min(n_ - 1, int(r.x / box_ * n_));
        y = std::min(n_ - 1, int(r.y / box_ * n_));
        z = std::min(n_ - 1, int(r.z / box_ * n_));
    }
    std::size_t index(int x, int y, int z) const {
        auto w = [&](int v) { return ((v % n_) + n_) % n_; };
        return (std::size_t(w(z)) * n_ + w(y)) * n_ + w(x);
    }
    double box_, cut2_;
    int n_;
    std::vector<std::vector<int>> cells_;
};

}  // namespace

SystemBundle generate_random_system(const GeneratorSpec& spec) {
    if (spec.background < 0 || spec.sites < 0 || spec.atoms_per_site < 1)
        throw InputError("particle and site counts must be non-negative");
    if (spec.forms_per_site < 2 || spec.forms_per_site > max_forms_per_site ||
        (spec.forms_per_site & (spec.forms_per_site - 1)) != 0)
        throw InputError("forms per site must be a power of two within 2.." + std::to_string(max_forms_per_site));
    if (!(spec.density > 0.0) || spec.min_distance < 0.0 || !(spec.cluster_radius > 0.0))
        throw InputError("density and cluster radius must be positive");
    const int total = spec.background + spec.sites * spec.atoms_per_site;
    if (total < 1) throw InputError("system would be empty");

    Sampler rng(spec.seed);
    SystemBundle out;
    auto& sys = out.system;
    sys.box_length = std::cbrt(total / spec.density);
    const double L = sys.box_length;
    Grid grid(L, std::max(spec.min_distance, 1e-9));
    auto wrap = [&](Vec3 r) {
        r.x = wrap_coordinate(r.x, L);
        r.y = wrap_coordinate(r.y, L);
        r.z = wrap_coordinate(r.z, L);
        return r;
    };
    auto place = [&](auto draw) {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            const Vec3 r = wrap(draw());
            if (grid.free(r, sys.positions)) {
                grid.insert(r, int(sys.positions.size()));
                sys.positions.push_back(r);
                return;
            }
        }
        throw InputError("could not place particles at the requested density and minimum distance");
    };
    auto anywhere = [&] { return Vec3{rng.uniform(0, L), rng.uniform(0, L), rng.uniform(0, L)}; };

    // sites first so that clusters get their space
    for (int s = 0; s < spec.sites; ++s) {
        TitratableSite site;
        const Vec3 center = anywhere();
        const double R = spec.cluster_radius;
        auto in_sphere = [&] {
            for (;;) {
                const Vec3 d{rng.uniform(-R, R), rng.uniform(-R, R), rng.uniform(-R, R)};
                if (norm2(d) <= R * R) return center + d;
            }
        };
        for (int a = 0; a < spec.atoms_per_site; ++a) {
            if (spec.distribution == SiteDistribution::typical)
                place(in_sphere);
            else
                place(anywhere);
            site.indices.push_back(int(sys.positions.size()) - 1);
        }
        site.forms.assign(spec.forms_per_site, std::vector<double>(spec.atoms_per_site));
        for (auto& form : site.forms)
            for (auto& q : form) q = rng.uniform(-1.0, 1.0);
        sys.sites.push_back(std::move(site));
    }
    for (int i = 0; i < spec.background; ++i) place(anywhere);

    sys.charges.resize(sys.positions.size());
    for (auto& q : sys.charges) q = rng.uniform(-1.0, 1.0);
    for (const auto& site : sys.sites)
        for (int a = 0; a < site.atom_count(); ++a) sys.charges[site.indices[a]] = site.forms[0][a];
    out.lambda = uniform_lambda(sys, 0.5);
    return out;
}

SystemBundle toy_two_form_site(double separation, double charge, double box_length) {
    if (!(separation > 0.0) || !(box_length > separation)) throw InputError("toy site does not fit in the box");
    SystemBundle out;
    auto& sys = out.system;
    sys.box_length = box_length;
    const double c = 0.5 * box_length;
    sys.positions = {{c - 0.5 * separation, c, c}, {c + 0.5 * separation, c, c}};
    sys.charges = {charge, -charge};
    TitratableSite site;
    site.indices = {0, 1};
    site.forms = {{charge, -charge}, {-charge, charge}};
    sys.sites.push_back(site);
    out.lambda = uniform_lambda(sys, 0.5);
    return out;
}

}  // namespace mahi
