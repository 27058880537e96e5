#pragma once

#include "qrep/loss.hpp"

#include <array>
#include <optional>
#include <string>

namespace qrep {

// A two-codeword bosonic code living in a truncated Fock space.
struct CodeSpec {
    std::string name;
    FockBasis basis;
    Vec logical0;
    Vec logical1;

    // normalized + mutually orthogonal
    void validate(double tol = 1e-10) const;
};

// Built-in codes:
//   "single-mode"  {|1>, |3>}                                     cutoff 3
//   "two-mode"     {(|40>+|04>)/sqrt(2), |22>}                    cutoff 4
//   "three-mode"   {|111>, (|300>+|030>+|003>)/sqrt(3)}           cutoff 3
CodeSpec builtin_code(const std::string& name);
std::vector<std::string> builtin_code_names();

// The loss-channel Kraus elements a code is asked to protect against: one
// single-photon-loss element per mode (labels e_i), optionally preceded by
// the no-loss element (label 0).
struct ErrorFamily {
    std::vector<Mat> ops;
    std::vector<std::string> names;
    bool includes_no_loss = false;
};

ErrorFamily build_error_family(const FockBasis& basis, double eta, bool include_no_loss);

// Correctability report for a code against the single-photon-loss family.
//
//   eq_residual         strict scalar form: max over family pairs (p, q) of
//                       max|P Ep†Eq P − c_pq P| with the best-fit scalar
//                       c_pq = tr(P Ep†Eq P)/2
//   structural_residual deviation of the normalized single-loss codeword
//                       images from an orthonormal family that is also
//                       orthogonal to the code space — the property the
//                       recovery construction actually consumes
//   no_loss_residual    scalar action of the no-loss element alone,
//                       max|P E0†E0 P − c P| (0 when not included)
//
// pass = structural within tol, and, when the no-loss element is included,
// no_loss_residual within tol as well. A code can pass while eq_residual is
// large: recovery then works but distorts coherences (see the single-mode
// code, whose distortion is tracked in closed form by the rate layer).
struct KLReport {
    double eta = 0.0;
    bool include_no_loss = false;
    double eq_residual = 0.0;
    double structural_residual = 0.0;
    double no_loss_residual = 0.0;
    std::vector<double> scalars;  // best-fit c_pp per family element
    bool pass = false;
};

KLReport kl_check(const CodeSpec& code, double eta, bool include_no_loss,
                  double tol = 1e-10);

// c_i = (1/2) sum_j <j_L| Ei†Ei |j_L>: probability that a codeword (uniform
// logical mixture) suffers exactly one photon loss in mode i.
std::vector<double> error_probabilities(const CodeSpec& code, double eta);

// Normalized single-loss images |j^(i)> = Ei|j_L>/||Ei|j_L>|| and their span
// projectors. The normalized images do not depend on eta (it scales out);
// eta only has to sit strictly inside (0, 1).
struct ErrorSpaces {
    Mat code_projector;
    std::vector<std::array<Vec, 2>> images;  // images[i] = {|0^(i+1)>, |1^(i+1)>}
    std::vector<Mat> projectors;
};

// Throws std::runtime_error when the images fail the structural requirement
// (orthonormal, orthogonal to the code space) beyond tol.
ErrorSpaces error_spaces(const CodeSpec& code, double eta = 0.5, double tol = 1e-10);

// Common total photon number of the two codewords, when the code is confined
// to one number eigenspace (both built-in multimode codes are; the
// single-mode code is not).
std::optional<int> number_eigenspace_photon(const CodeSpec& code, double tol = 1e-12);

}  // namespace qrep
