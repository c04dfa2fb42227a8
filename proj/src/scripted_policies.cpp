#include <algorithm>
#include <array>

#include "hep/llm_backend.hpp"

namespace hep {

namespace {

constexpr std::string_view kZealotStalker = "Zealot & Stalker tactic";
constexpr std::string_view kCarrier = "Carrier tactic";

// Prices as written in the bundled game data. A policy only sees the
// observation text, so it carries its own copy of the price list.
struct Price {
    int minerals;
    int gas;
    int supply;
};

Price price(ActionId id) {
    switch (id) {
        case ActionId::TrainProbe: return {50, 0, 1};
        case ActionId::BuildPylon: return {100, 0, 0};
        case ActionId::BuildNexus: return {400, 0, 0};
        case ActionId::BuildAssimilator: return {75, 0, 0};
        case ActionId::BuildGateway: return {150, 0, 0};
        case ActionId::BuildCyberneticsCore: return {150, 0, 0};
        case ActionId::BuildForge: return {150, 0, 0};
        case ActionId::BuildStargate: return {150, 150, 0};
        case ActionId::BuildFleetBeacon: return {300, 200, 0};
        case ActionId::TrainZealot: return {100, 0, 2};
        case ActionId::TrainStalker: return {125, 50, 2};
        case ActionId::TrainCarrier: return {350, 250, 6};
        case ActionId::ResearchWarpgate: return {50, 50, 0};
        case ActionId::ResearchGroundWeaponLevel1: return {100, 100, 0};
        case ActionId::ResearchGroundArmorLevel1: return {100, 100, 0};
        case ActionId::ResearchAirWeaponLevel1: return {100, 100, 0};
        case ActionId::ResearchAirWeaponLevel2: return {175, 175, 0};
        case ActionId::ResearchAirArmorLevel1: return {150, 150, 0};
        case ActionId::ResearchAirArmorLevel2: return {225, 225, 0};
        default: return {0, 0, 0};
    }
}

class Planner {
public:
    explicit Planner(const ObservationSnapshot& o)
        : minerals_(o.minerals), gas_(o.gas), free_supply_(o.supply_cap - o.supply_used) {}

    bool buy(ActionId id) {
        const Price p = price(id);
        if (p.minerals > minerals_ || p.gas > gas_ || p.supply > free_supply_) return false;
        minerals_ -= p.minerals;
        gas_ -= p.gas;
        free_supply_ -= p.supply;
        actions_.push_back(id);
        return true;
    }
    // Written out even when it cannot be paid for yet; the money is set aside.
    void insist(ActionId id) {
        if (buy(id)) return;
        actions_.push_back(id);
        minerals_ -= price(id).minerals;
        gas_ -= price(id).gas;
    }
    void add(ActionId id) { actions_.push_back(id); }

    int minerals() const { return minerals_; }
    int gas() const { return gas_; }
    const std::vector<ActionId>& actions() const { return actions_; }

private:
    int minerals_;
    int gas_;
    int free_supply_;
    std::vector<ActionId> actions_;
};

int all(const ObservationSnapshot& o, BuildingKind k) {
    return o.buildings[idx(k)].complete + o.buildings[idx(k)].in_progress;
}
int done(const ObservationSnapshot& o, BuildingKind k) { return o.buildings[idx(k)].complete; }
int building(const ObservationSnapshot& o, BuildingKind k) { return o.buildings[idx(k)].in_progress; }
int units(const ObservationSnapshot& o, UnitKind k) { return o.units[idx(k)] + o.in_production[idx(k)]; }
bool started(const ObservationSnapshot& o, TechKind t) { return o.research_percent[idx(t)] >= 0; }
bool finished(const ObservationSnapshot& o, TechKind t) { return o.research_percent[idx(t)] >= 100; }

bool carrier_phase(const ObservationSnapshot& o) {
    return o.time_s >= 360 || (o.time_s >= 240 && done(o, BuildingKind::Nexus) >= 2);
}

int wanted_assimilators(const ObservationSnapshot& o) {
    if (all(o, BuildingKind::Pylon) == 0 || o.time_s < 40) return 0;
    const int n = (o.time_s >= 100 ? 2 : 1) + 2 * std::max(0, done(o, BuildingKind::Nexus) - 1);
    return std::min(n, 2 * all(o, BuildingKind::Nexus));
}

bool nexus_due(const ObservationSnapshot& o) {
    const int nexus = all(o, BuildingKind::Nexus);
    if (nexus < 2) return o.time_s >= 60;
    return nexus < 3 && done(o, BuildingKind::Nexus) >= 2 && units(o, UnitKind::Probe) >= 38;
}

void train_probes(Planner& p, const ObservationSnapshot& o) {
    const int target = std::min(16 * all(o, BuildingKind::Nexus) + 3 * all(o, BuildingKind::Assimilator), 70);
    const int missing = target - units(o, UnitKind::Probe);
    const int queue_room = 2 * done(o, BuildingKind::Nexus);
    for (int i = 0; i < std::min(missing, queue_room); ++i) {
        if (!p.buy(ActionId::TrainProbe)) break;
    }
}

void build_pylons(Planner& p, const ObservationSnapshot& o) {
    if (o.time_s < 20 || o.supply_cap >= 200) return;
    if (all(o, BuildingKind::Pylon) == 0) {
        p.buy(ActionId::BuildPylon);
        return;
    }
    const int producers =
        done(o, BuildingKind::Nexus) + done(o, BuildingKind::Gateway) + 3 * done(o, BuildingKind::Stargate);
    const int buffer = 2 + 2 * producers;
    int headroom = o.supply_cap + 8 * building(o, BuildingKind::Pylon) + 15 * building(o, BuildingKind::Nexus) -
                   o.supply_used;
    for (int i = 0; i < 3 && headroom < buffer; ++i) {
        if (!p.buy(ActionId::BuildPylon)) break;
        headroom += 8;
    }
}

void take_gas(Planner& p, const ObservationSnapshot& o) {
    for (int i = all(o, BuildingKind::Assimilator); i < wanted_assimilators(o); ++i) {
        if (!p.buy(ActionId::BuildAssimilator)) break;
    }
}

// Something on the tech path wants gas and the bank cannot pay for it.
bool gas_starved(const ObservationSnapshot& o) {
    if (all(o, BuildingKind::CyberneticsCore) == 0 || building(o, BuildingKind::Assimilator) > 0) return false;
    return o.gas < (done(o, BuildingKind::FleetBeacon) > 0 ? 250 : 100);
}

void use_chronoboost(Planner& p, const ObservationSnapshot& o) {
    int busy = 0;
    for (auto k : kAllUnits) busy += o.in_production[idx(k)] > 0 ? 1 : 0;
    for (auto t : kAllTechs) busy += (started(o, t) && !finished(o, t)) ? 1 : 0;
    for (int i = 0; i < std::min(o.chrono_ready, busy); ++i) p.add(ActionId::ChronoboostNexus);
}

void gateway_tech(Planner& p, const ObservationSnapshot& o, int gateways) {
    if (done(o, BuildingKind::Pylon) == 0) return;
    if (all(o, BuildingKind::Gateway) == 0) {
        p.buy(ActionId::BuildGateway);
        return;
    }
    if (done(o, BuildingKind::Gateway) > 0 && all(o, BuildingKind::CyberneticsCore) == 0) {
        p.buy(ActionId::BuildCyberneticsCore);
    }
    if (done(o, BuildingKind::CyberneticsCore) > 0 && !started(o, TechKind::Warpgate)) {
        p.buy(ActionId::ResearchWarpgate);
    }
    if (all(o, BuildingKind::CyberneticsCore) > 0) {
        for (int i = all(o, BuildingKind::Gateway); i < gateways; ++i) {
            if (!p.buy(ActionId::BuildGateway)) break;
        }
    }
}

void gateway_units(Planner& p, const ObservationSnapshot& o, int keep_minerals, int keep_gas) {
    int slots = done(o, BuildingKind::Gateway) -
                (o.in_production[idx(UnitKind::Zealot)] + o.in_production[idx(UnitKind::Stalker)]);
    for (; slots > 0; --slots) {
        const bool stalker = done(o, BuildingKind::CyberneticsCore) > 0 && p.gas() - keep_gas >= 50 &&
                             p.minerals() - keep_minerals >= 125;
        if (stalker) {
            if (!p.buy(ActionId::TrainStalker)) break;
        } else if (p.minerals() - keep_minerals >= 100) {
            if (!p.buy(ActionId::TrainZealot)) break;
        } else {
            break;
        }
    }
}

// One research at a time at the Cybernetics Core.
bool core_busy(const ObservationSnapshot& o) {
    for (auto t : {TechKind::Warpgate, TechKind::AirWeapons1, TechKind::AirWeapons2, TechKind::AirArmor1,
                   TechKind::AirArmor2}) {
        if (started(o, t) && !finished(o, t)) return true;
    }
    return false;
}

bool forge_busy(const ObservationSnapshot& o) {
    for (auto t : {TechKind::GroundWeapons1, TechKind::GroundArmor1}) {
        if (started(o, t) && !finished(o, t)) return true;
    }
    return false;
}

void air_research(Planner& p, const ObservationSnapshot& o) {
    if (done(o, BuildingKind::CyberneticsCore) == 0 || core_busy(o)) return;
    struct Step {
        TechKind tech;
        ActionId action;
        bool needs_beacon;
    };
    constexpr std::array kOrder{Step{TechKind::AirWeapons1, ActionId::ResearchAirWeaponLevel1, false},
                                Step{TechKind::AirArmor1, ActionId::ResearchAirArmorLevel1, false},
                                Step{TechKind::AirWeapons2, ActionId::ResearchAirWeaponLevel2, true},
                                Step{TechKind::AirArmor2, ActionId::ResearchAirArmorLevel2, true}};
    for (const auto& s : kOrder) {
        if (started(o, s.tech)) continue;
        if (s.needs_beacon && done(o, BuildingKind::FleetBeacon) == 0) return;
        p.buy(s.action);
        return;
    }
}

void ground_research(Planner& p, const ObservationSnapshot& o, bool armor) {
    if (done(o, BuildingKind::Gateway) == 0) return;
    if (all(o, BuildingKind::Forge) == 0) {
        p.buy(ActionId::BuildForge);
        return;
    }
    if (done(o, BuildingKind::Forge) == 0 || forge_busy(o)) return;
    if (!started(o, TechKind::GroundWeapons1)) {
        p.buy(ActionId::ResearchGroundWeaponLevel1);
    } else if (armor && !started(o, TechKind::GroundArmor1)) {
        p.buy(ActionId::ResearchGroundArmorLevel1);
    }
}

void carrier_build(Planner& p, const ObservationSnapshot& o) {
    gateway_tech(p, o, 1);
    if (done(o, BuildingKind::CyberneticsCore) == 0) return;
    if (all(o, BuildingKind::Stargate) == 0) {
        p.buy(ActionId::BuildStargate);
        return;
    }
    if (done(o, BuildingKind::Stargate) > 0 && all(o, BuildingKind::FleetBeacon) == 0) {
        p.buy(ActionId::BuildFleetBeacon);
    }
    if (done(o, BuildingKind::FleetBeacon) > 0) {
        for (int i = o.in_production[idx(UnitKind::Carrier)]; i < done(o, BuildingKind::Stargate); ++i) {
            if (!p.buy(ActionId::TrainCarrier)) break;
        }
    }
    air_research(p, o);
    const int stargates = std::min(1 + done(o, BuildingKind::Nexus), 4);
    if (done(o, BuildingKind::FleetBeacon) > 0 || building(o, BuildingKind::FleetBeacon) > 0) {
        for (int i = all(o, BuildingKind::Stargate); i < stargates; ++i) {
            if (!p.buy(ActionId::BuildStargate)) break;
        }
    }
    // Spare minerals with no gas to match become Zealots.
    if (p.minerals() > 400) gateway_units(p, o, 300, 1000000);
}

void scout(Planner& p, const ObservationSnapshot& o) {
    if (o.time_s > 0 && o.time_s % 240 == 0 && !o.scout_en_route) p.add(ActionId::ScoutWithProbe);
}

std::string list_buildings(const ObservationSnapshot& o) {
    std::string out;
    for (auto k : kAllBuildings) {
        const auto& b = o.buildings[idx(k)];
        if (b.complete == 0 && b.in_progress == 0) continue;
        if (!out.empty()) out += ", ";
        out += std::to_string(b.complete) + " " + std::string(name_of(k));
        if (b.in_progress > 0) out += " (+" + std::to_string(b.in_progress) + " in progress)";
    }
    return out.empty() ? "none" : out;
}

std::string list_research(const ObservationSnapshot& o) {
    std::string out;
    for (auto t : kAllTechs) {
        if (!started(o, t)) continue;
        if (!out.empty()) out += ", ";
        out += std::string(name_of(t)) + " " + std::to_string(o.research_percent[idx(t)]) + "%";
    }
    return out.empty() ? "none started" : out;
}

std::string list_army(const ObservationSnapshot& o) {
    std::string out;
    for (auto k : {UnitKind::Zealot, UnitKind::Stalker, UnitKind::Carrier}) {
        if (o.units[idx(k)] == 0) continue;
        if (!out.empty()) out += ", ";
        out += std::to_string(o.units[idx(k)]) + " " + std::string(name_of(k));
    }
    return out.empty() ? "no army" : out;
}

}  // namespace

std::optional<Policy> parse_policy(std::string_view name) {
    if (name == "hep_oracle") return Policy::HepOracle;
    if (name == "hep_no_etp_oracle") return Policy::HepNoEtpOracle;
    if (name == "hep_no_hdp_oracle") return Policy::HepNoHdpOracle;
    if (name == "baseline_oracle") return Policy::BaselineOracle;
    if (name == "noop_oracle") return Policy::NoopOracle;
    return std::nullopt;
}

std::string_view to_string(Policy policy) {
    switch (policy) {
        case Policy::HepOracle: return "hep_oracle";
        case Policy::HepNoEtpOracle: return "hep_no_etp_oracle";
        case Policy::HepNoHdpOracle: return "hep_no_hdp_oracle";
        case Policy::BaselineOracle: return "baseline_oracle";
        case Policy::NoopOracle: return "noop_oracle";
    }
    return "noop_oracle";
}

const std::vector<std::string>& policy_names() {
    static const std::vector<std::string> names{"hep_oracle", "hep_no_etp_oracle", "hep_no_hdp_oracle",
                                                "baseline_oracle", "noop_oracle"};
    return names;
}

PolicyTraits traits_for(Policy policy, std::string_view system_prompt) {
    PolicyTraits t;
    t.tactics = system_prompt.find("Choose Tactic") != std::string_view::npos;
    t.priorities = system_prompt.find("Priority Construction Analysis") != std::string_view::npos;
    switch (policy) {
        case Policy::HepOracle: break;
        case Policy::HepNoEtpOracle: t.tactics = false; break;
        case Policy::HepNoHdpOracle: t.priorities = false; break;
        case Policy::BaselineOracle:
            t = PolicyTraits{false, false, true, false};
            break;
        case Policy::NoopOracle: t = PolicyTraits{false, false, false, true}; break;
    }
    return t;
}

std::string scripted_response(const PolicyTraits& tr, const ObservationSnapshot& o) {
    const std::string clock = format_clock(o.time_s);
    if (tr.noop) return "Game time: " + clock + ".\nDecisions:\n<EMPTY ACTION>\n";

    Planner p(o);
    std::optional<std::string_view> tactic;
    if (tr.tactics) tactic = carrier_phase(o) ? kCarrier : kZealotStalker;

    std::optional<ActionId> priority;
    if (tr.priorities) {
        if (nexus_due(o)) {
            priority = ActionId::BuildNexus;
        } else if (all(o, BuildingKind::Assimilator) < wanted_assimilators(o)) {
            priority = ActionId::BuildAssimilator;
        }
    }

    if (priority) {
        p.insist(*priority);
        if (*priority == ActionId::BuildAssimilator) take_gas(p, o);
        train_probes(p, o);
        build_pylons(p, o);
    } else if (tr.baseline) {
        train_probes(p, o);
        build_pylons(p, o);
        gateway_tech(p, o, 3);
        ground_research(p, o, false);
        gateway_units(p, o, 0, 0);
        if (o.time_s >= 180 && all(o, BuildingKind::Nexus) < 2) p.buy(ActionId::BuildNexus);
        if (done(o, BuildingKind::CyberneticsCore) > 0 && all(o, BuildingKind::Assimilator) < 2) {
            p.buy(ActionId::BuildAssimilator);
        }
        use_chronoboost(p, o);
        if (o.army_supply >= 50) p.add(ActionId::Attack);
    } else {
        train_probes(p, o);
        build_pylons(p, o);
        if (tactic == kCarrier) {
            carrier_build(p, o);
        } else if (tactic == kZealotStalker) {
            gateway_tech(p, o, 2);
            gateway_units(p, o, 0, 0);
        } else {
            gateway_tech(p, o, 2 + done(o, BuildingKind::Nexus));
            ground_research(p, o, true);
            gateway_units(p, o, 0, 0);
        }
        if (!tr.priorities) {
            // Without the priority layer the economy is run reactively: a new
            // base once the current ones are saturated, gas once it runs short.
            const int nexus = all(o, BuildingKind::Nexus);
            const int saturation = 16 * nexus + 3 * all(o, BuildingKind::Assimilator);
            if (nexus < 3 && units(o, UnitKind::Probe) >= saturation) p.buy(ActionId::BuildNexus);
            if (gas_starved(o) && all(o, BuildingKind::Assimilator) < nexus) p.buy(ActionId::BuildAssimilator);
        }
        use_chronoboost(p, o);
        scout(p, o);
        const bool air_done = finished(o, TechKind::AirWeapons2) && finished(o, TechKind::AirArmor2);
        const bool strong =
            tactic == kCarrier ? o.units[idx(UnitKind::Carrier)] >= 12 && air_done : o.army_supply >= 60;
        if (strong) p.add(ActionId::Attack);
    }
    if (p.actions().empty()) p.add(ActionId::EmptyAction);

    std::string r;
    r += "Game time: the game is at " + clock + ".\n";
    r += "Data extraction:\n";
    r += "- Resources: " + std::to_string(o.minerals) + " minerals and " + std::to_string(o.gas) + " gas.\n";
    r += "- Supply: " + std::to_string(o.supply_used) + " of " + std::to_string(o.supply_cap) + " used, " +
         std::to_string(o.worker_supply) + " workers and " + std::to_string(o.army_supply) + " army supply.\n";
    r += "- Buildings: " + list_buildings(o) + ".\n";
    r += "- Army: " + list_army(o) + ".\n";
    r += "- Research: " + list_research(o) + ".\n";
    if (tactic) {
        r += "Tactic selection:\n";
        if (*tactic == kCarrier) {
            r += "- Two bases are running and gas is flowing, so the Carrier tactic applies.\n";
        } else {
            r += "- It is still the early game, so the Zealot & Stalker tactic applies.\n";
        }
        r += "Current Tactic: " + std::string(*tactic) + "\n";
    }
    if (tr.priorities) {
        r += "Priority construction analysis:\n";
        r += "- Nexus: " + std::to_string(all(o, BuildingKind::Nexus)) + " in total" +
             (nexus_due(o) ? ", another one is due now.\n" : ", no new one needed yet.\n");
        r += "- Assimilator: " + std::to_string(all(o, BuildingKind::Assimilator)) + " of " +
             std::to_string(wanted_assimilators(o)) + " wanted.\n";
        std::string field = "NONE";
        if (priority) {
            const auto s = surface(*priority);
            field = std::string(s.substr(1, s.size() - 2));
        }
        r += "Priority: " + field + "\n";
    }
    r += "Conventional construction planning:\n";
    r += "- Economy: " + std::to_string(o.units[idx(UnitKind::Probe)]) + " Probes working.\n";
    r += "- Supply: " + std::to_string(o.supply_cap - o.supply_used) + " free supply.\n";
    r += "- Military: " + list_army(o) + ".\n";
    r += "Decisions:\n";
    for (auto id : p.actions()) {
        r += surface(id);
        r += '\n';
    }
    return r;
}

std::string scripted_response(Policy policy, const MessageList& messages) {
    const std::string_view system = messages.empty() ? std::string_view{} : std::string_view{messages.front().content};
    const PolicyTraits tr = traits_for(policy, system);
    std::optional<ObservationSnapshot> obs;
    for (auto it = messages.rbegin(); it != messages.rend() && !obs; ++it) {
        if (it->role == Role::User) obs = parse_observation(it->content);
    }
    if (!obs) return "The observation could not be read.\nDecisions:\n<EMPTY ACTION>\n";
    return scripted_response(tr, *obs);
}

}  // namespace hep
