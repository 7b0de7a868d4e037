#pragma once

#include "mel/economy.hpp"

namespace mel {

// Expected discounted value of an unmatched agent under arbitrary strategies.
//
//   H:  lambda [tb*phi_hh + (1-tb)*a(H)*phi_hl] / (r + lambda (tb + (1-tb) a(H)))
//   L:  lambda [tb*a'(H)*phi_lh + (1-tb)*a(L)*a'(L)*phi_ll]
//         / (r + lambda (tb*a'(H) + (1-tb)*a(L)*a'(L)))
//
// tb is the opposite side's high-skill share, a the agent's own acceptance of
// low partners, a' the opposite side's. High partners are always accepted, so
// an H agent's value does not involve a'. Denominators stay positive (r > 0).
// Rejects NaN inputs.
double value_general(const Economy& e, Skill own, double own_accept_low, double opp_high_share,
                     const AcceptancePair& opp_accept);

// All-match values: value_general with every acceptance probability 1.
//   H: lambda [tb*phi_hh + (1-tb)*phi_hl] / (r + lambda),  L analogously.
double value_am(const Economy& e, Skill own, double opp_high_share);

// Assortative values: highs wait for highs, lows for lows.
//   H: lambda tb phi_hh / (r + lambda tb),  L: lambda (1-tb) phi_ll / (r + lambda (1-tb)).
double value_pam(const Economy& e, Skill own, double opp_high_share);

}  // namespace mel
