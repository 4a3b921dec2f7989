#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <string>

#include "sfdm/cube_assembly.hpp"
#include "sfdm/io.hpp"

using namespace sfdm;

TEST(Format, NineDecimals) {
    EXPECT_EQ(format_fixed9(3.5138307191), "3.513830719");
    EXPECT_EQ(format_fixed9(2.0), "2.000000000");
    EXPECT_EQ(round9(9.9018854324), 9.901885432);
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
}

TEST(BranchCsv, HeaderAndRows) {
    Branch b{0.1, 0.1, 0.2, {}};
    BranchPoint p;
    p.amplitude = 0.1;
    p.lambda = 1.23456789012;
    p.iterations = 4;
    p.converged = true;
    p.max_u = 0.1;
    b.points.push_back(p);
    p.amplitude = 0.2;
    p.converged = false;
    p.reset_used = true;
    b.points.push_back(p);
    std::ostringstream s;
    write_branch_csv(s, b);
    EXPECT_EQ(s.str(),
              "A,lambda,iterations,converged,reset_used,max_u\n"
              "0.10000000000000001,1.234567890,4,1,0,0.10000000000000001\n"
              "0.20000000000000001,1.234567890,4,0,1,0.10000000000000001\n");
}

TEST(BranchCsv, ByteIdenticalAcrossRuns) {
    const auto sys = assemble_sfdm(GridSpec(3, 12), FixedAmplitude{0.1});
    std::ostringstream a, b;
    write_branch_csv(a, trace_branch(sys, 0.1, 0.1, 8.0));
    write_branch_csv(b, trace_branch(sys, 0.1, 0.1, 8.0));
    const std::string text = a.str();
    EXPECT_EQ(text, b.str());
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 81);
}

TEST(StabilityCsv, HeaderAndKind) {
    StabilityResult r{SystemKind::fdm, {{0.2, 1.5, -3.25}}};
    std::ostringstream s;
    write_stability_csv(s, r);
    EXPECT_EQ(s.str(), "A,lambda,sigma_max,kind\n0.20000000000000001,1.500000000,-3.25,FDM\n");
}
