def quantize_waveform(samples, lattice):
    """Snap each sample onto the quantization lattice."""
    step = lattice.spacing
    return [round(s / step) * step for s in samples]


def mix_channels(left, right, balance=0.5):
    """Blend stereo channels into one track."""
    return [balance * l + (1 - balance) * r for l, r in zip(left, right)]
