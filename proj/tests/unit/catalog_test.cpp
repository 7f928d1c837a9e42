/*
 * Copyright 2026 The BGPSecX Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "bgpsecx/catalog.hpp"
#include "bgpsecx/error.hpp"
#include "support.hpp"

using namespace bgpsecx;

TEST(Catalog, ManifestListsAllFixtures)
{
    const auto all = load_manifest(test::data_dir());
    std::vector<std::string> ids;
    for (const auto& m : all) ids.push_back(m.id);
    EXPECT_EQ(ids, (std::vector<std::string>{"S1", "S2", "S3", "S4", "replay3", "clean", "collector-sample"}));
    for (const auto& m : all) {
        EXPECT_FALSE(m.files.empty()) << m.id;
        EXPECT_TRUE(verify_digests(m, test::data_dir()).empty()) << m.id;
        EXPECT_NE(m.scenario.has_value(), m.trace.has_value()) << m.id;
    }
}

TEST(Catalog, ScenarioCatalogCoversEachDefense)
{
    const auto s = scenario_catalog(test::data_dir());
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s[0].scenario->defense, "roa");
    EXPECT_EQ(s[0].scenario->reasons, std::vector<std::string>{"roa-invalid"});
    EXPECT_EQ(s[1].scenario->defense, "whitelist");
    EXPECT_EQ(s[1].scenario->reasons, std::vector<std::string>{"whitelist-violation"});
    EXPECT_EQ(s[2].scenario->defense, "federation");
    EXPECT_EQ(s[3].scenario->defense, "anomaly");
    EXPECT_EQ(s[3].scenario->action, Action::Flag);
}

TEST(Catalog, DigestMismatchReported)
{
    const auto dir = test::temp_dir("catalog");
    std::filesystem::create_directories(dir / "scenarios" / "s1");
    for (const auto& m : load_manifest(test::data_dir())) {
        if (m.id != "S1") continue;
        for (const auto& f : m.files) {
            std::filesystem::copy_file(test::data_dir() / f.path, dir / f.path);
        }
        EXPECT_TRUE(verify_digests(m, dir).empty());
        std::ofstream(dir / m.files[0].path, std::ios::app) << "\n";
        EXPECT_EQ(verify_digests(m, dir).size(), 1u);
        std::filesystem::remove(dir / m.files[1].path);
        EXPECT_EQ(verify_digests(m, dir).size(), 2u);
    }
    std::filesystem::remove_all(dir);
}

TEST(Catalog, MissingManifestIsIoError)
{
    const auto dir = test::temp_dir("nomanifest");
    try {
        load_manifest(dir);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Io);
    }
    std::filesystem::remove_all(dir);
}
