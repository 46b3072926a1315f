"""Distributed broadcast encryption over composite-order bilinear groups."""

from .bitstring import BitString
from .dbe_ad import (
    AdKeyPair,
    AdPublicKey,
    AdSecretKey,
    CiphertextHeaderAD,
    ad_decaps,
    ad_encaps,
    ad_gen_key,
    ad_is_valid,
    ad_setup,
    ad_sizes,
)
from .dbe_ss import (
    CiphertextHeaderSS,
    PublicParams,
    SessionKey,
    UserPublicKey,
    UserSecretKey,
    count_elements,
    ss_decaps,
    ss_encaps,
    ss_gen_key,
    ss_is_valid,
    ss_setup,
    ss_sizes,
)
from .directory import Directory, dir_create, dir_get, dir_load, dir_register
from .errors import *  # noqa: F401,F403
from .groups import Backend, GElem, GroupParams, GTElem, generate_params, pair
from .hashing import HashKey, hash_gt, sample_hash_key
from .ske import ske_decrypt, ske_encrypt, ske_gen_key

__version__ = "0.1.0"
