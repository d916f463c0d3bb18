import numpy as np

# Stream identifiers keep draws for different purposes independent
STREAM_DIRECTION = 0
STREAM_SAMPLE_PLUS = 1
STREAM_SAMPLE_MINUS = 2
STREAM_NOISE = 3
STREAM_RADIUS = 4
STREAM_GRAPH = 5
STREAM_DATA = 6
STREAM_PROBE = 7


def keyed_generator(*key: int):
    """
    Creates a generator whose output is a pure function of the key. The key
    words are mixed by a SeedSequence and drive a counter-based Philox bit
    generator, so no state is shared between calls.

    Args:
        key: Integers, e.g. (seed, iteration, node, stream). Each is taken
            modulo 2^64.

    Returns:
        A numpy.random.Generator.
    """
    # Length prefix: SeedSequence zero-pads short entropy
    words = [len(key)]
    for k in key:
        k = int(k) & 0xFFFFFFFFFFFFFFFF
        words.extend((k & 0xFFFFFFFF, k >> 32))
    words = np.array(words, dtype=np.uint32)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))
