#include "sofred/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace sofred::fft {

namespace {

fftw_plan plan_for(int n, int sign)
{
    static std::mutex mu;
    static std::map<std::pair<int, int>, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, sign);
    auto it = plans.find(key);
    if (it != plans.end())
        return it->second;
    std::vector<std::complex<double>> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, plan);
    return plan;
}

void run(std::complex<double>* data, int n, int sign)
{
    if (n <= 1)
        return;
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_for(n, sign), p, p);
}

} // namespace

void forward(std::complex<double>* data, int n) { run(data, n, FFTW_FORWARD); }

void inverse(std::complex<double>* data, int n) { run(data, n, FFTW_BACKWARD); }

} // namespace sofred::fft
