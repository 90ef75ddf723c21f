#pragma once

namespace muskat {

// Energy-inequality data computed per report time.
//   e_h32   : (1/2) |f|_{H^{3/2}}^2
//   ddt_e   : <Lambda^{3/2} f, Lambda^{3/2} RHS(f)>
//   dissip3 : int |Lambda^3 f|^2 / (1+f_x^2)^{3/2} dx
//   dissip32: int |Lambda^{3/2} f|^2 / (1+f_x^2)^{3/2} dx
//   bound   : |f|_{H3}^2 (P(|f|_{H32}) + |f|_{H32} |f|_{B1}) + Q(|f|_{H32}) |f|_{H32}
//             with P(X) = X + X^2 + X^3 + X^4 and Q(X) = X + X^2
//   K_required: smallest K with ddt_e + sigma dissip3 <= K bound
struct EnergyReport {
    double e_h32 = 0.0;
    double ddt_e = 0.0;
    double dissip3 = 0.0;
    double dissip32 = 0.0;
    double bound = 0.0;
    double K_required = 0.0;
};

} // namespace muskat
