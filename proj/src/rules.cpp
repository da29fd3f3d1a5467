// Fire-rule registries. The printed sets are transcribed verbatim; the
// corrected sets differ only where the read/write-set oracle finds a missing
// dependency (see RULES_ERRATA.md for each change).
#include "nd/algorithms.hpp"

namespace nd {

namespace {

// ---- matrix multiply -------------------------------------------------------

constexpr const char* kMmPrinted = R"(
MM: +1 -> -1 via MM
MM: +2 -> -2 via MM
)";

// MM joins the two k-halves of one multiply. The printed set reuses MM for
// the refined arrows, which is right only when both ends are single blocks.
// Here MM (half -> half) refines to MMP (row pair -> row pair), which
// refines to MMC (whole multiply -> whole multiply on the same C). MMC has
// to order the source's second half before the sink's first half.
constexpr const char* kMmCorrected = R"(
MM: +1 -> -1 via MMP
MM: +2 -> -2 via MMP
MMP: +1 -> -1 via MMC
MMP: +2 -> -2 via MMC
MMC: +2 -> -1 via MM
)";

// ---- triangular solve --------------------------------------------------------

constexpr const char* kTrsPrinted = R"(
TM: +1.1.1 -> -1.1.1
TM: +1.1.1 -> -1.2.1
TM: +1.2.1 -> -1.1.2
TM: +1.2.1 -> -1.2.2
TM: +2.1 -> -2.1.1
TM: +2.1 -> -2.2.1
TM: +2.2 -> -2.1.2
TM: +2.2 -> -2.2.2
2TM2T: +1.2 -> -1 via MT
2TM2T: +2.2 -> -2 via MT
MT: +2.1.1 -> -1.1.2 via MM
MT: +2.1.2 -> -1.2.2 via MM
MT: +2.2.1 -> -1.1.1 via MT
MT: +2.2.2 -> -1.2.1 via MT
)";

// MT: the sink atoms are paired with the wrong sources. C00 and C01 feed
// the two sub-solves, C10 and C11 feed the two sub-multiplies.
constexpr const char* kTrsCorrected = R"(
TM: +1.1.1 -> -1.1.1
TM: +1.1.1 -> -1.2.1
TM: +1.2.1 -> -1.1.2
TM: +1.2.1 -> -1.2.2
TM: +2.1 -> -2.1.1
TM: +2.1 -> -2.2.1
TM: +2.2 -> -2.1.2
TM: +2.2 -> -2.2.2
2TM2T: +1.2 -> -1 via MT
2TM2T: +2.2 -> -2 via MT
MT: +2.1.1 -> -1.1.1 via MT
MT: +2.1.2 -> -1.2.1 via MT
MT: +2.2.1 -> -1.1.2 via MMC
MT: +2.2.2 -> -1.2.2 via MMC
)";

// ---- Cholesky --------------------------------------------------------------

constexpr const char* kChoPrinted = R"(
CT: +1.1 -> -1.1.1
CT: +1.1 -> -1.2.1
CT: +1.2 -> -1.2.1 via TM2
CT: +1.2 -> -1.2.2 via TM2
CT: +2.2 -> -2.1
CT: +2.2 -> -2.2
CTMC: +2 -> -1 via TM2
TM2: + -> - via TM
TM2: + -> - via TM1
TM1: +1.1.1 -> -1.1.1
TM1: +1.1.1 -> -1.1.2
TM1: +1.2.1 -> -1.1.1
TM1: +1.2.1 -> -1.1.2
TM1: +2.1 -> -2.1.1
TM1: +2.1 -> -2.1.2
TM1: +2.2 -> -2.2.1
TM1: +2.2 -> -2.2.1
MC: +2.1.1 -> -1.1
MC: +2.2.1 -> -1.2 via MT
MC: +2.2.2 -> -2.2
)";

// CT: L10 of the source feeds the sink multiplies at 1.1.2 and 1.2.2.
// TM1: each source block feeds the pair of multiplies using it as the
//      left operand (fixes two misdirected atoms and the duplicate).
// MC: the solve at 1.2 reads its right-hand side through a transposed view,
//     so the refinement needs the transposed forms MTT / MMCT; the update
//     of A11 at 2.2.2 must precede the sink's own update of A11 at 2.1.
constexpr const char* kChoCorrected = R"(
CT: +1.1 -> -1.1.1
CT: +1.1 -> -1.2.1
CT: +1.2 -> -1.1.2 via TM2
CT: +1.2 -> -1.2.2 via TM2
CT: +2.2 -> -2.1
CT: +2.2 -> -2.2
CTMC: +2 -> -1 via TM2
TM2: + -> - via TM
TM2: + -> - via TM1
TM1: +1.1.1 -> -1.1.1
TM1: +1.1.1 -> -1.1.2
TM1: +1.2.1 -> -1.2.1
TM1: +1.2.1 -> -1.2.2
TM1: +2.1 -> -2.1.1
TM1: +2.1 -> -2.1.2
TM1: +2.2 -> -2.2.1
TM1: +2.2 -> -2.2.2
MC: +2.1.1 -> -1.1
MC: +2.2.1 -> -1.2 via MTT
MC: +2.2.2 -> -2.2
MC: +2.2.2 -> -2.1 via MMC
MTT: +2.1.1 -> -1.1.1
MTT: +2.1.2 -> -1.1.2 via MMCT
MTT: +2.2.1 -> -1.2.1
MTT: +2.2.2 -> -1.2.2 via MMCT
MMCT: +2.1.1 -> -1.1.1
MMCT: +2.1.2 -> -1.2.1
MMCT: +2.2.1 -> -1.1.2
MMCT: +2.2.2 -> -1.2.2
)";

// ---- 1-D Floyd-Warshall ------------------------------------------------------

// The last BB atom is printed without its sign; it is read as a sink atom.
constexpr const char* kFwPrinted = R"(
AB: +1.1 -> -1.1
AB: +1.1 -> -1.2
AB: +2.1 -> -2.1
AB: +2.1 -> -2.2
ABAB: +2 -> -1 via BA
BA: +2.1 -> -1.1
BA: +2.2 -> -1.2 via BB
BBBB: +1 -> -1 via BB
BBBB: +2 -> -2 via BB
BB: +2.1 -> -1.1
BB: +2.2 -> -1.2
)";

// ABAB: the first row of X10 reads the last row of X00. AD orders an A task
// before the B task directly below it; its left half is a B task (BB) and
// its right half an A task (AD again).
constexpr const char* kFwCorrected = R"(
AB: +1.1 -> -1.1
AB: +1.1 -> -1.2
AB: +2.1 -> -2.1
AB: +2.1 -> -2.2
ABAB: +2 -> -1 via BA
ABAB: +1 -> -2 via AD
AD: +2.2 -> -1.1 via BB
AD: +2.1 -> -1.2 via AD
BA: +2.1 -> -1.1
BA: +2.2 -> -1.2 via BB
BBBB: +1 -> -1 via BB
BBBB: +2 -> -2 via BB
BB: +2.1 -> -1.1
BB: +2.2 -> -1.2
)";

// ---- LCS ---------------------------------------------------------------------

constexpr const char* kLcsPrinted = R"(
HV: + -> -1 via H
HV: + -> -2 via V
VH: +1 -> - via V
VH: +2 -> - via H
H: +1.2.1 -> -1.1
H: +2 -> -1.2.2
V: +1.2.2 -> -1.1
V: +2 -> -1.2.1
)";

// The three-way composition is binary here: ((X00 HV (X01 || X10)) VH X11).
// VH's source is the left subtree, so X01 and X10 sit at 2.1 and 2.2.
constexpr const char* kLcsCorrected = R"(
HV: + -> -1 via H
HV: + -> -2 via V
VH: +2.1 -> - via V
VH: +2.2 -> - via H
H: +1.2.1 -> -1.1
H: +2 -> -1.2.2
V: +1.2.2 -> -1.1
V: +2 -> -1.2.1
)";

}  // namespace

std::string registry_text(Algorithm a, RuleVariant v) {
  const bool p = v == RuleVariant::Printed;
  switch (a) {
    case Algorithm::MM:
      return p ? kMmPrinted : kMmCorrected;
    case Algorithm::TRS:
      return std::string(p ? kTrsPrinted : kTrsCorrected) + (p ? kMmPrinted : kMmCorrected);
    case Algorithm::CHOLESKY:
      return std::string(p ? kChoPrinted : kChoCorrected) + (p ? kTrsPrinted : kTrsCorrected) +
             (p ? kMmPrinted : kMmCorrected);
    case Algorithm::FW1D:
      return p ? kFwPrinted : kFwCorrected;
    case Algorithm::LCS:
      return p ? kLcsPrinted : kLcsCorrected;
  }
  return {};
}

}  // namespace nd
