#pragma once
// Generated by generate.py; do not edit.

namespace oracle {

inline constexpr double k_lp200_o3_freqs[] = {1.0, 50.0, 100.0, 200.0, 400.0, 1000.0, 5000.0};
inline constexpr double k_lp200_o3_mag[] = {1.0, 0.9998781968784334, 0.9922901322785063, 0.7071067811865508, 0.12364248250678765, 0.0077954545010436175, 2.8824823836444763e-05};
inline constexpr double k_bp1_1000_o2_freqs[] = {0.25, 1.0, 10.0, 100.0, 1000.0, 3000.0, 9000.0};
inline constexpr double k_bp1_1000_o2_mag[] = {0.0622628668299335, 0.7071067800362097, 0.999966935348276, 0.9999683416039417, 0.7071067811865471, 0.0948078656237247, 0.00026389628415895587};
inline constexpr double k_hp1_o2_freqs[] = {0.1, 0.5, 1.0, 5.0, 50.0};
inline constexpr double k_hp1_o2_mag[] = {0.009999499286799359, 0.24253562184848407, 0.7071067812419962, 0.9992009594096919, 0.9999999200063827};
inline constexpr double k_lp250_o3_freqs[] = {10.0, 250.0, 500.0};
inline constexpr double k_lp250_o3_mag[] = {0.9999999979588394, 0.707106781186548, 0.12342193898843465};
inline constexpr double k_filtfilt_lp200_idx[] = {8000.0, 9000.0, 10000.0, 11000.0, 12000.0};
inline constexpr double k_filtfilt_lp200_val[] = {1.2999800130118861, 1.7313955022365461, 1.9913474209980169, 2.046851406720984, 1.9070785088890607};
inline constexpr double k_filtfilt_bp_idx[] = {90000.0, 100000.0, 110000.0};
inline constexpr double k_filtfilt_bp_val[] = {0.07719336545428443, -0.9632830101087292, 0.16967825782457077};
inline constexpr double k_sw3_x[] = {1.0, 2.0, 4.0};
inline constexpr double k_sw3_w = 0.9642857142857142;
inline constexpr double k_sw3_p = 0.6368868450289689;
inline constexpr double k_sw5_x[] = {2.1, 3.4, 1.9, 5.6, 4.4};
inline constexpr double k_sw5_w = 0.9320849391953863;
inline constexpr double k_sw5_p = 0.6106559022604845;
inline constexpr double k_sw11_x[] = {9.5776, 8.9645, 10.2992, 6.4202, 10.5689, 9.3566, 8.5479, 10.1971, 6.0971, 9.6832, 8.5374};
inline constexpr double k_sw11_w = 0.8699014981317474;
inline constexpr double k_sw11_p = 0.07729597354344156;
inline constexpr double k_sw20_x[] = {7.2895, 0.3193, 2.2049, 1.1469, 12.8428, 2.4501, 0.8466, 3.2919, 0.6293, 0.7067, 7.1509, 2.7604, 1.4247, 3.3828, 3.1564, 2.3324, 1.4243, 1.9663, 3.518, 3.3144};
inline constexpr double k_sw20_w = 0.7539124939659465;
inline constexpr double k_sw20_p = 0.00019164919312710847;
inline constexpr double k_sw50_x[] = {0.2252, 1.6966, -1.9621, 0.8743, -1.0237, -0.8686, -0.0184, -1.5106, -1.1946, -0.5055, -0.3225, -1.9037, -0.8736, -0.1459, -0.1319, -0.6623, -0.0041, -0.5134, 1.1735, -0.8091, 0.0591, -0.4896, 0.8546, -0.9715, 0.8766, -1.1953, -1.367, -0.5485, 0.0921, -1.521, -0.5042, -0.004, -0.0356, 0.8756, 0.7843, 0.3328, 0.9134, 0.9397, -1.1092, 2.1853, -0.0489, -0.6059, 0.6001, -0.4886, 0.6272, -1.2014, 0.7254, -1.2639, 0.3757, -0.2132};
inline constexpr double k_sw50_w = 0.9819889159061505;
inline constexpr double k_sw50_p = 0.6383331541067695;
inline constexpr double k_t_a[] = {5.49, 6.1, 4.8, 5.95, 5.2, 6.4, 4.95, 5.7, 5.3};
inline constexpr double k_t_b[] = {7.29, 7.9, 6.1, 8.2, 6.85, 7.75, 7.05, 7.4, 6.95};
inline constexpr double k_trel_two_sided_t = -16.87102779759931;
inline constexpr double k_trel_two_sided_p = 1.5443241449191712e-07;
inline constexpr double k_t1_two_sided_t = 30.893121464874657;
inline constexpr double k_t1_two_sided_p = 1.3100018594689927e-09;
inline constexpr double k_trel_less_t = -16.87102779759931;
inline constexpr double k_trel_less_p = 7.721620724595856e-08;
inline constexpr double k_t1_less_t = 30.893121464874657;
inline constexpr double k_t1_less_p = 0.9999999993449991;
inline constexpr double k_trel_greater_t = -16.87102779759931;
inline constexpr double k_trel_greater_p = 0.9999999227837928;
inline constexpr double k_t1_greater_t = 30.893121464874657;
inline constexpr double k_t1_greater_p = 6.550009297344963e-10;
inline constexpr double k_tcdf_m1p5_df7 = 0.08864924349498501;
inline constexpr double k_tsf_2p2_df3 = 0.05758597598823535;
inline constexpr double k_rs_a[] = {1.2, 3.4, 5.6, 2.2};
inline constexpr double k_rs_b[] = {4.5, 6.7, 8.9, 7.1, 0.5};
inline constexpr double k_rs_two_sided_u = 5.0;
inline constexpr double k_rs_two_sided_p = 0.2857142857142857;
inline constexpr double k_rs_less_u = 5.0;
inline constexpr double k_rs_less_p = 0.14285714285714285;
inline constexpr double k_rs_greater_u = 5.0;
inline constexpr double k_rs_greater_p = 0.9047619047619049;
inline constexpr double k_rst_a[] = {1.0, 2.0, 2.0, 3.0, 5.0};
inline constexpr double k_rst_b[] = {2.0, 3.0, 3.0, 4.0, 6.0, 6.0};
inline constexpr double k_rst_u = 7.0;
inline constexpr double k_rst_less_p = 0.08658008658008658;
inline constexpr double k_rst_greater_p = 0.9393939393939394;
inline constexpr double k_rst_two_sided_p = 0.17316017316017315;
inline constexpr double k_rsa_a[] = {-0.5, 0.2, -0.6, -0.8, 0.4, 1.9, -1.0, 1.2, 1.1, -1.1, 0.2, 0.5, -0.9, 1.1, 0.9, 1.7, 0.4, 0.9, 1.8, 0.2, -0.5, -1.5, 0.3, -1.3, 1.1};
inline constexpr double k_rsa_b[] = {0.5, 1.2, 0.6, 1.6, -0.1, 0.5, 1.8, -0.9, 0.6, 1.4, -0.7, -0.3, -0.8, 1.6, 0.2, 0.1, -1.0, -0.7, 1.3, 0.2};
inline constexpr double k_rsa_two_sided_u = 230.5;
inline constexpr double k_rsa_two_sided_p = 0.6638897063487528;
inline constexpr double k_rsa_less_u = 230.5;
inline constexpr double k_rsa_less_p = 0.3319448531743764;
inline constexpr double k_rsa_greater_u = 230.5;
inline constexpr double k_rsa_greater_p = 0.6763154636409847;
inline constexpr double k_reg_x[] = {0.5, 1.5, 2.0, 3.5, 4.0, 6.5};
inline constexpr double k_reg_y[] = {1.1, 2.9, 4.2, 6.8, 8.1, 13.4};
inline constexpr double k_reg_slope = 2.0478260869565217;
inline constexpr double k_reg_intercept = -0.06014492753623202;
inline constexpr double k_reg_r2 = 0.9981814377665504;
inline constexpr double k_hann384_sum = 191.5;
inline constexpr double k_hann384_at100 = 0.5348327777790262;

}  // namespace oracle
