#!/usr/bin/python3
# SPDX-License-Identifier: LGPL-2.1+

from setuptools import find_packages, setup

setup(
    name="chunkdec",
    version="1",
    description="Chunk-parallel decompression of RLE and Deflate archives",
    license="LGPLv2+",
    python_requires=">=3.8",
    packages=find_packages(".", exclude=["tests"]),
    install_requires=["numpy>=1.17"],
    extras_require={
        "completion": ["argcomplete"],
        "test": ["pytest", "hypothesis"],
    },
    scripts=["bin/chunkdec"],
)
