#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nctf/signal_io.hpp"
#include "nctf/types.hpp"

namespace nctf {

struct MetricReport {
  std::string file;
  std::string method;
  double kl_fit = 0.0;
  double lsd_db = 0.0;
  double cd = 0.0;
};

/// Frame-wise RMS of 20 log10((a + d) / (b + d)), then RMS over frames.
/// d = 10^(floor_db / 20) * max(max(a), max(b)); a zero peak gives 0.
double log_spectral_distance(const Matrix& a, const Matrix& b, double floor_db = -80.0);

/// KL(y | y_hat) / sum(y).
double kl_fit(const Matrix& y, const Matrix& y_hat);

struct CepstralConfig {
  int order = 24;
  std::size_t frame_len = 512;
  // Reference frames more than this far below the loudest one are skipped.
  double active_range_db = 40.0;
};

/// Real cepstrum of one windowed frame: inverse DFT of ln |X|, c[0..order].
std::vector<double> frame_cepstrum(const std::vector<double>& frame, int order);

/// Mean over active reference frames of (10 / ln 10) sqrt(2 sum_{n=1}^{order}
/// (c_ref[n] - c_test[n])^2), using FFT cepstra of Hann-windowed frames
/// (half overlap). Throws LengthMismatch or SampleRateMismatch.
double cepstral_distance(const Signal& ref, const Signal& test, const CepstralConfig& config = {});

/// Header: file,method,kl_fit,lsd_db,cd
void write_metric_csv_header(std::ostream& os);
void write_metric_csv_row(std::ostream& os, const MetricReport& row);

}  // namespace nctf
