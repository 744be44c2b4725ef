#include "agri/radio.hpp"

#include <cmath>

namespace agri::radio {

void LoraConfig::validate() const {
    if (spreading_factor < 6 || spreading_factor > 12)
        throw ValidationError("spreading factor out of 6..12");
    if (bandwidth_hz <= 0.0) throw ValidationError("bandwidth must be positive");
    if (coding_rate_denom < 5 || coding_rate_denom > 8)
        throw ValidationError("coding rate denominator out of 5..8");
    if (frequency_hz <= 0.0) throw ValidationError("frequency must be positive");
    if (preamble_symbols < 0) throw ValidationError("preamble symbols must be >= 0");
}

void LinkBudget::validate() const {
    if (rx_sensitivity_dbm >= 0.0) throw ValidationError("rx sensitivity must be negative");
    if (path_loss_exponent < 1.5 || path_loss_exponent > 6.0)
        throw ValidationError("path loss exponent out of [1.5, 6]");
    if (shadowing_sigma_db < 0.0) throw ValidationError("shadowing sigma must be >= 0");
}

double symbol_time_s(const LoraConfig& cfg) {
    cfg.validate();
    return std::pow(2.0, cfg.spreading_factor) / cfg.bandwidth_hz;
}

double airtime_s(const LoraConfig& cfg, int payload_bytes) {
    cfg.validate();
    if (payload_bytes < 0 || payload_bytes > 255)
        throw ValidationError("payload bytes out of 0..255");
    const double t_sym = std::pow(2.0, cfg.spreading_factor) / cfg.bandwidth_hz;
    const int de = cfg.low_data_rate_opt ? 1 : 0;
    const int ih = cfg.explicit_header ? 0 : 1;
    const int crc = cfg.crc_on ? 1 : 0;
    const double num = 8.0 * payload_bytes - 4.0 * cfg.spreading_factor + 28.0 + 16.0 * crc -
                       20.0 * ih;
    const double groups = std::ceil(num / (4.0 * (cfg.spreading_factor - 2 * de)));
    const double payload_symbols =
        8.0 + std::max(groups * (cfg.coding_rate_denom - 4 + 4), 0.0);
    return (cfg.preamble_symbols + 4.25 + payload_symbols) * t_sym;
}

double rssi_at(const LinkBudget& link, double distance_m) {
    link.validate();
    if (distance_m < 1.0) throw ValidationError("distance must be >= 1 m");
    return link.tx_power_dbm + link.tx_antenna_gain_dbi + link.rx_antenna_gain_dbi -
           (link.reference_loss_db + 10.0 * link.path_loss_exponent * std::log10(distance_m));
}

double calibrate_exponent(const LinkBudget& link, double distance_m,
                          double observed_rssi_dbm) {
    if (distance_m <= 1.0) throw ValidationError("calibration distance must be > 1 m");
    const double eirp =
        link.tx_power_dbm + link.tx_antenna_gain_dbi + link.rx_antenna_gain_dbi;
    const double n =
        (eirp - link.reference_loss_db - observed_rssi_dbm) / (10.0 * std::log10(distance_m));
    if (n <= 0.0)
        throw ValidationError("observation implies non-positive path loss exponent");
    return n;
}

double max_range_m(const LinkBudget& link) {
    link.validate();
    const double eirp =
        link.tx_power_dbm + link.tx_antenna_gain_dbi + link.rx_antenna_gain_dbi;
    return std::pow(10.0, (eirp - link.reference_loss_db - link.rx_sensitivity_dbm) /
                              (10.0 * link.path_loss_exponent));
}

bool delivered(const LinkBudget& link, double distance_m, Rng& rng) {
    double rssi = rssi_at(link, distance_m);
    if (link.shadowing_sigma_db > 0.0) rssi += rng.gaussian(0.0, link.shadowing_sigma_db);
    return rssi >= link.rx_sensitivity_dbm;
}

}  // namespace agri::radio
