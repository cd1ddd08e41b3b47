// presets.hpp — shipped run configurations, one per reproduced plot panel.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tlsmap/cli/config.hpp"
#include "tlsmap/errors.hpp"

namespace tlsmap::cli {

struct Preset {
    std::string_view name;
    std::string_view description;
    std::string_view text;  // key=value lines applied on top of the defaults
};

inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = {
        {"fig1-left", "isolated TLS from z(0) = 0.999 for several asymmetries",
         "mode=isolated\ndelta=1\nZ0=0.999\nPhi0=0\ntf=20\nsweep=epsilon\nsweep_values=0,0.5,1,2\n"},
        {"fig1-right", "isolated TLS from z(0) = 0 for several asymmetries",
         "mode=isolated\ndelta=1\nZ0=0\nPhi0=0\ntf=20\nsweep=epsilon\nsweep_values=-1,0,1\n"},
        {"fig2", "symmetric momentum-momentum pair across the self-trapping transition",
         "mode=pair\ndelta=1\ndelta2=1\nepsilon=0\nepsilon2=0\ncoupling=mm\nZ0=0.99999\nz0=0.99999\n"
         "Phi0=0\nphi0=0\ntf=20\nsweep=lambda\nsweep_values=1,2,3,4,4.5,8\n"},
        {"fig2-scan", "classification scan of the fig2 pair over lambda",
         "mode=scan-lambda\ndelta=1\ndelta2=1\nepsilon=0\nepsilon2=0\ncoupling=mm\nZ0=0.99999\nz0=0.99999\n"
         "Phi0=0\nphi0=0\ntf=50\nhorizon=50\ngrid=0.1:10:50\n"},
        {"fig3-left", "pair with epsilon1 = 0, epsilon2 = 1",
         "mode=pair\ndelta=1\ndelta2=1\nepsilon=0\nepsilon2=1\ncoupling=mm\nZ0=0.99999\nz0=0.99999\n"
         "Phi0=0\nphi0=0\ntf=20\nsweep=lambda\nsweep_values=1,2,3,4,4.5,8\n"},
        {"fig3-right", "pair with epsilon1 = epsilon2 = 1",
         "mode=pair\ndelta=1\ndelta2=1\nepsilon=1\nepsilon2=1\ncoupling=mm\nZ0=0.99999\nz0=0.99999\n"
         "Phi0=0\nphi0=0\ntf=20\nsweep=lambda\nsweep_values=1,2,3,4,4.5,8\n"},
        {"fig4-left", "pair at lambda = 0.5, Z(0) = 0.999999, varying z(0)",
         "mode=pair\ndelta=1\ndelta2=1\nepsilon=0\nepsilon2=0\ncoupling=mm\nlambda=0.5\nZ0=0.999999\n"
         "Phi0=0\nphi0=0\ntf=20\nsweep=z0\nsweep_values=0.999999,0\n"},
        {"fig4-right", "pair at lambda = 0.5, Z(0) = 0, varying z(0)",
         "mode=pair\ndelta=1\ndelta2=1\nepsilon=0\nepsilon2=0\ncoupling=mm\nlambda=0.5\nZ0=0\n"
         "Phi0=0\nphi0=0\ntf=20\nsweep=z0\nsweep_values=0.999999,0\n"},
        {"fig5-left", "biased pair at lambda = 0.5, Z(0) = 0.99999, varying z(0)",
         "mode=pair\ndelta=1\ndelta2=1\nepsilon=1\nepsilon2=1\ncoupling=mm\nlambda=0.5\nZ0=0.99999\n"
         "Phi0=0\nphi0=0\ntf=20\nsweep=z0\nsweep_values=0.99999,0\n"},
        {"fig5-right", "biased pair at lambda = 0.5, Z(0) = 0, varying z(0)",
         "mode=pair\ndelta=1\ndelta2=1\nepsilon=1\nepsilon2=1\ncoupling=mm\nlambda=0.5\nZ0=0\n"
         "Phi0=0\nphi0=0\ntf=20\nsweep=z0\nsweep_values=0.99999,0\n"},
        {"fig6", "final central population over the initial phase of environment TLS 1 (N = 2)",
         "mode=scan-chaos\nN=2\nlambda=1\ndelta=1\nepsilon=0\nenv_delta=1\nenv_epsilon=0\n"
         "Z0=0.2573\nPhi0=2.7386\nenv_z0=0.3112,0.0478\nenv_phi0=0,6.2429\n"
         "sweep_coord=phi_1\ntf=20\ngrid=0:0.1:1001\n"},
        {"fig8-weak", "ensemble-averaged central population, lambda = 0.5",
         "mode=ensemble\nN=12\nn=2000\nlambda=0.5\ndelta=1\nepsilon=0\nenv_delta=1\nenv_epsilon=0\n"
         "Z0=0.9999\nPhi0=0\ntf=20\nsample_every=50\n"},
        {"fig8-strong", "ensemble-averaged central population, lambda = 50",
         "mode=ensemble\nN=12\nn=2000\nlambda=50\ndelta=1\nepsilon=0\nenv_delta=1\nenv_epsilon=0\n"
         "Z0=0.9999\nPhi0=0\ntf=20\nsample_every=50\n"},
        {"fig9", "five single realizations at lambda = 0.5",
         "mode=bath\nN=12\nlambda=0.5\ndelta=1\nepsilon=0\nenv_delta=1\nenv_epsilon=0\nZ0=0.9999\nPhi0=0\n"
         "tf=50\nsample_every=50\nsweep=realization\nsweep_values=0,1,2,3,4\n"},
        {"fig10", "ensemble with lambda = 0.01 and epsilon = epsilon_i = 1",
         "mode=ensemble\nN=12\nn=2000\nlambda=0.01\ndelta=1\nepsilon=1\nenv_delta=1\nenv_epsilon=1\n"
         "Z0=0.9999\nPhi0=0\ntf=20\nsample_every=50\n"},
        {"fig11", "ensemble with lambda = 1, epsilon = 0, epsilon_i = 10",
         "mode=ensemble\nN=12\nn=2000\nlambda=1\ndelta=1\nepsilon=0\nenv_delta=1\nenv_epsilon=10\n"
         "Z0=0.9999\nPhi0=0\ntf=20\nsample_every=50\n"},
    };
    return table;
}

inline const Preset& find_preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    std::string known;
    for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + std::string(p.name);
    throw ConfigError("unknown preset '" + std::string(name) + "' (available: " + known + ")");
}

inline void apply_preset(RunConfig& c, std::string_view name) {
    const Preset& p = find_preset(name);
    apply_text(c, p.text, "preset " + std::string(name));
}

} // namespace tlsmap::cli
