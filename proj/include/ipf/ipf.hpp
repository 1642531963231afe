#pragma once

#include "ipf/error.hpp"
#include "ipf/inventory.hpp"
#include "ipf/corpus.hpp"
#include "ipf/core.hpp"
#include "ipf/pipeline.hpp"
#include "ipf/io_formats.hpp"
