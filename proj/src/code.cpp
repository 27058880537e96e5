#include "qrep/code.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qrep {

namespace {

Vec superposition(const FockBasis& basis,
                  const std::vector<std::pair<std::vector<int>, cxd>>& parts) {
    Vec v(basis.dim);
    for (const auto& [occ, amp] : parts) v[basis.index_of(occ)] = amp;
    return v;
}

void check_open_eta(double eta) {
    if (!(eta > 0.0) || !(eta < 1.0))
        throw std::invalid_argument("error family needs eta strictly inside (0, 1)");
}

}  // namespace

void CodeSpec::validate(double tol) const {
    if (logical0.n != basis.dim || logical1.n != basis.dim)
        throw std::invalid_argument("code '" + name + "': codeword dimension mismatch");
    const double n0 = norm(logical0);
    const double n1 = norm(logical1);
    const double ov = std::abs(dot(logical0, logical1));
    if (std::abs(n0 - 1.0) > tol || std::abs(n1 - 1.0) > tol)
        throw std::invalid_argument("code '" + name + "': codewords are not normalized");
    if (ov > tol)
        throw std::invalid_argument("code '" + name + "': codewords are not orthogonal (|<0|1>| = " +
                                    std::to_string(ov) + ")");
}

CodeSpec builtin_code(const std::string& name) {
    const double r2 = 1.0 / std::sqrt(2.0);
    const double r3 = 1.0 / std::sqrt(3.0);
    if (name == "single-mode") {
        FockBasis b(1, 3);
        return {name, b, superposition(b, {{{1}, 1.0}}), superposition(b, {{{3}, 1.0}})};
    }
    if (name == "two-mode") {
        FockBasis b(2, 4);
        return {name, b, superposition(b, {{{4, 0}, r2}, {{0, 4}, r2}}),
                superposition(b, {{{2, 2}, 1.0}})};
    }
    if (name == "three-mode") {
        FockBasis b(3, 3);
        return {name, b, superposition(b, {{{1, 1, 1}, 1.0}}),
                superposition(b, {{{3, 0, 0}, r3}, {{0, 3, 0}, r3}, {{0, 0, 3}, r3}})};
    }
    throw std::invalid_argument("unknown code '" + name +
                                "' (expected single-mode, two-mode or three-mode)");
}

std::vector<std::string> builtin_code_names() {
    return {"single-mode", "two-mode", "three-mode"};
}

ErrorFamily build_error_family(const FockBasis& basis, double eta, bool include_no_loss) {
    check_open_eta(eta);
    const KrausChannel ch = build_loss_channel(basis, eta);
    ErrorFamily fam;
    fam.includes_no_loss = include_no_loss;
    auto take = [&](const std::vector<int>& label, const std::string& name) {
        for (const auto& op : ch.ops)
            if (op.label == label) {
                fam.ops.push_back(op.m);
                fam.names.push_back(name);
                return;
            }
        throw std::logic_error("loss channel is missing the " + name + " element");
    };
    if (include_no_loss) take(std::vector<int>(basis.modes, 0), "E0");
    for (int i = 0; i < basis.modes; ++i) {
        std::vector<int> label(basis.modes, 0);
        label[i] = 1;
        take(label, "E" + std::to_string(i + 1));
    }
    return fam;
}

KLReport kl_check(const CodeSpec& code, double eta, bool include_no_loss, double tol) {
    code.validate();
    const ErrorFamily fam = build_error_family(code.basis, eta, include_no_loss);
    const std::array<const Vec*, 2> words{&code.logical0, &code.logical1};
    Mat proj = outer(code.logical0, code.logical0);
    add_scaled(proj, 1.0, outer(code.logical1, code.logical1));

    KLReport rep;
    rep.eta = eta;
    rep.include_no_loss = include_no_loss;

    // Family images E_p |a_L> once.
    std::vector<std::array<Vec, 2>> img(fam.ops.size());
    for (std::size_t p = 0; p < fam.ops.size(); ++p)
        for (int a = 0; a < 2; ++a) img[p][a] = matvec(fam.ops[p], *words[a]);

    auto scalar_residual = [&](std::size_t p, std::size_t q, double& c_out) {
        Mat block(2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) block(a, b) = dot(img[p][a], img[q][b]);
        const cxd c = 0.5 * trace(block);
        Mat dev(code.basis.dim);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                cxd w = block(a, b);
                if (a == b) w -= c;
                if (w != cxd{}) add_scaled(dev, w, outer(*words[a], *words[b]));
            }
        c_out = c.real();
        return max_abs(dev);
    };

    rep.scalars.resize(fam.ops.size());
    for (std::size_t p = 0; p < fam.ops.size(); ++p)
        for (std::size_t q = p; q < fam.ops.size(); ++q) {
            double c = 0.0;
            const double r = scalar_residual(p, q, c);
            rep.eq_residual = std::max(rep.eq_residual, r);
            if (p == q) {
                rep.scalars[p] = c;
                if (fam.includes_no_loss && p == 0) rep.no_loss_residual = r;
            }
        }

    // Structural property: the normalized single-loss images together with the
    // codewords form an orthonormal family.
    std::vector<Vec> family{*words[0], *words[1]};
    const std::size_t loss_from = fam.includes_no_loss ? 1 : 0;
    for (std::size_t p = loss_from; p < fam.ops.size(); ++p)
        for (int a = 0; a < 2; ++a) {
            Vec v = img[p][a];
            const double nn = norm(v);
            if (nn < 1e-14) {
                rep.structural_residual = 1.0;  // image collapsed; nothing to recover into
                continue;
            }
            scale(v, 1.0 / nn);
            family.push_back(std::move(v));
        }
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i; j < family.size(); ++j) {
            const cxd g = dot(family[i], family[j]);
            const double dev = std::abs(i == j ? g - cxd{1.0} : g);
            rep.structural_residual = std::max(rep.structural_residual, dev);
        }

    rep.pass = rep.structural_residual <= tol &&
               (!fam.includes_no_loss || rep.no_loss_residual <= tol);
    return rep;
}

std::vector<double> error_probabilities(const CodeSpec& code, double eta) {
    code.validate();
    check_open_eta(eta);
    // Ei†Ei = (1-eta) n_i eta^(N-1) is diagonal in the Fock basis, so the
    // traces come straight off the codeword amplitudes.
    std::vector<double> c(code.basis.modes, 0.0);
    for (const Vec* w : {&code.logical0, &code.logical1})
        for (std::size_t s = 0; s < w->n; ++s) {
            const double w2 = std::norm((*w)[s]);
            if (w2 == 0.0) continue;
            const double pref =
                0.5 * w2 * (1.0 - eta) * std::pow(eta, code.basis.total_photons(s) - 1);
            for (int i = 0; i < code.basis.modes; ++i)
                c[i] += pref * code.basis.occupation_of(s, i);
        }
    return c;
}

ErrorSpaces error_spaces(const CodeSpec& code, double eta, double tol) {
    code.validate();
    const ErrorFamily fam = build_error_family(code.basis, eta, false);
    const std::array<const Vec*, 2> words{&code.logical0, &code.logical1};

    ErrorSpaces es;
    es.code_projector = outer(code.logical0, code.logical0);
    add_scaled(es.code_projector, 1.0, outer(code.logical1, code.logical1));

    for (std::size_t i = 0; i < fam.ops.size(); ++i) {
        std::array<Vec, 2> pair;
        for (int a = 0; a < 2; ++a) {
            Vec v = matvec(fam.ops[i], *words[a]);
            const double nn = norm(v);
            if (nn < 1e-14)
                throw std::runtime_error("code '" + code.name + "': " + fam.names[i] +
                                         " annihilates logical " + std::to_string(a));
            scale(v, 1.0 / nn);
            pair[a] = std::move(v);
        }
        es.images.push_back(std::move(pair));
    }

    // Orthonormality of codewords + all images, in one Gram pass.
    std::vector<const Vec*> family{words[0], words[1]};
    std::vector<std::string> labels{"0_L", "1_L"};
    for (std::size_t i = 0; i < es.images.size(); ++i)
        for (int a = 0; a < 2; ++a) {
            family.push_back(&es.images[i][a]);
            labels.push_back(std::to_string(a) + "^(" + std::to_string(i + 1) + ")");
        }
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i; j < family.size(); ++j) {
            const cxd g = dot(*family[i], *family[j]);
            const double dev = std::abs(i == j ? g - cxd{1.0} : g);
            if (dev > tol) {
                std::ostringstream msg;
                msg << "code '" << code.name << "': error spaces are not orthonormal, <"
                    << labels[i] << "|" << labels[j] << "> deviates by " << dev;
                throw std::runtime_error(msg.str());
            }
        }

    for (const auto& pair : es.images) {
        Mat p = outer(pair[0], pair[0]);
        add_scaled(p, 1.0, outer(pair[1], pair[1]));
        es.projectors.push_back(std::move(p));
    }
    return es;
}

std::optional<int> number_eigenspace_photon(const CodeSpec& code, double tol) {
    std::set<int> totals;
    for (const Vec* w : {&code.logical0, &code.logical1})
        for (std::size_t i = 0; i < w->n; ++i)
            if (std::abs((*w)[i]) > tol) totals.insert(code.basis.total_photons(i));
    if (totals.size() == 1) return *totals.begin();
    return std::nullopt;
}

}  // namespace qrep
