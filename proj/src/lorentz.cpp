#include "birot/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace birot {

double RearrangementProfile::total_measure() const {
    double t = 0.0;
    for (const auto& p : plateaus) t += p.measure;
    return t;
}

namespace {

double round_12sig(double v) {
    if (v == 0.0) return 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return std::strtod(buf, nullptr);
}

}  // namespace

RearrangementProfile rearrange(const ScalarField& f) {
    const GridSpec& g = f.grid();
    const double hr = g.dr(), hs = g.ds();
    const bool node = g.stagger == Stagger::node_centered;

    std::vector<Plateau> samples;
    samples.reserve(f.values().size());
    for (int j = 0; j < g.count_s(); ++j) {
        for (int i = 0; i < g.count_r(); ++i) {
            const double v = round_12sig(std::abs(f.at(i, j)));
            if (v == 0.0) continue;
            double m = measure_weight({g.r(i), g.s(j)}, hr, hs);
            if (node) {
                if (i == 0 || i == g.n_r) m *= 0.5;
                if (j == 0 || j == g.n_s) m *= 0.5;
            }
            if (m == 0.0) continue;  // axis samples carry no orbit volume
            samples.push_back({v, m});
        }
    }
    std::sort(samples.begin(), samples.end(),
              [](const Plateau& a, const Plateau& b) { return a.value > b.value; });

    RearrangementProfile prof;
    for (const auto& s : samples) {
        if (!prof.plateaus.empty() && prof.plateaus.back().value == s.value)
            prof.plateaus.back().measure += s.measure;
        else
            prof.plateaus.push_back(s);
    }
    return prof;
}

double lorentz_norm(const RearrangementProfile& prof, double p, double q) {
    if (!(p > 1.0)) throw std::invalid_argument("lorentz_norm: p must be > 1");
    if (!(q >= 1.0)) throw std::invalid_argument("lorentz_norm: q must be >= 1 or infinity");
    if (prof.plateaus.empty()) return 0.0;

    if (std::isinf(q)) {
        double t_end = 0.0, best = 0.0;
        for (const auto& pl : prof.plateaus) {
            t_end += pl.measure;
            best = std::max(best, pl.value * std::pow(t_end, 1.0 / p));
        }
        return best;
    }
    const double e = q / p;
    double t = 0.0, acc = 0.0;
    for (const auto& pl : prof.plateaus) {
        const double t_next = t + pl.measure;
        acc += std::pow(pl.value, q) * (p / q) * (std::pow(t_next, e) - std::pow(t, e));
        t = t_next;
    }
    return std::pow(acc, 1.0 / q);
}

double lorentz_norm(const ScalarField& f, double p, double q) {
    return lorentz_norm(rearrange(f), p, q);
}

void write_profile(const std::filesystem::path& file, const RearrangementProfile& prof) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << prof.plateaus.size() << " 0 0 0 profile\n";
    char buf[32];
    for (const auto& pl : prof.plateaus) {
        std::snprintf(buf, sizeof buf, "%.17g", pl.value);
        out << buf << ' ';
        std::snprintf(buf, sizeof buf, "%.17g", pl.measure);
        out << buf << '\n';
    }
}

RearrangementProfile read_profile(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::size_t n;
    double z;
    std::string tag;
    if (!(in >> n >> z >> z >> z >> tag) || tag != "profile")
        throw std::runtime_error("malformed profile header in " + file.string());
    RearrangementProfile prof;
    prof.plateaus.resize(n);
    for (auto& pl : prof.plateaus)
        if (!(in >> pl.value >> pl.measure))
            throw std::runtime_error("truncated profile " + file.string());
    return prof;
}

}  // namespace birot
