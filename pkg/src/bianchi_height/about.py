# about.py

__version__ = "0.1.0"
__package__ = "bianchi_height"
__program_name__ = "bianchi-height"
__author__ = "Fernando Pujaico Rivera"
__email__  = "fernando.pujaico.rivera@gmail.com"
__description__ = "Exact reduction, height certificates and counting for Bianchi groups PSL(2, O_d)."
__url_source__  = "https://github.com/trucomanx/BianchiHeight"
__url_doc__  = "https://github.com/trucomanx/BianchiHeight/tree/main/doc"
__url_funding__ = "https://trucomanx.github.io/en/funding.html"
__url_bugs__    = "https://github.com/trucomanx/BianchiHeight/issues"
