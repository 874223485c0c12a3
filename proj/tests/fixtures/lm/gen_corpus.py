#!/usr/bin/env python3
# Copyright 2026 The semicorpus Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
"""Writes the in-domain LM training text and the held-out normal sentences.

Template expansion over call-centre dialogue with no filler words. Run from
this directory; output is deterministic for the fixed seed.
"""
import random

rng = random.Random(20260118)

NAMES = ["john", "sarah", "mike", "lisa", "david", "maria", "james", "karen",
         "robert", "linda", "steve", "amy", "brian", "nancy", "kevin", "emily"]
BUSINESSES = ["the dental office", "the service department", "the front desk",
              "the hotel", "the insurance office", "the body shop",
              "the cable company", "the moving company", "the pharmacy",
              "customer care", "the parts department", "the sales team"]
DAYS = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday",
        "tomorrow", "today", "next week", "this afternoon", "this morning"]
TIMES = ["nine", "ten", "eleven", "noon", "one", "two", "three", "four",
         "five", "nine thirty", "ten fifteen", "two thirty", "four forty five"]
DIGITS = ["zero", "one", "two", "three", "four", "five", "six", "seven",
          "eight", "nine"]
THINGS = ["an appointment", "an oil change", "a cleaning", "a quote",
          "a reservation", "a new phone", "my bill", "my account",
          "my policy", "a refund", "the estimate", "my order",
          "a tire rotation", "the brakes checked", "a room for two nights"]
VEHICLES = ["chevy tahoe", "honda civic", "ford focus", "toyota camry",
            "chevy silverado", "nissan altima", "jeep cherokee"]
ISSUES = ["my internet is down", "the check engine light is on",
          "my tooth has been hurting", "the bill looks wrong",
          "the package never arrived", "my card was declined",
          "the heater stopped working", "the car is making a noise",
          "i was charged twice", "my phone will not turn on"]

AGENT = [
    "thank you for calling {biz} this is {name} how can i help you",
    "thank you for calling {biz} how may i help you today",
    "good morning {biz} this is {name} speaking",
    "good afternoon thank you for calling {biz}",
    "can i get your first and last name please",
    "can i have your phone number please",
    "can i get the phone number on the account",
    "what is the best number to reach you at",
    "and what is the address on the account",
    "can you spell your last name for me",
    "let me pull up your account",
    "let me check the schedule for {day}",
    "i have an opening on {day} at {time}",
    "we can get you in on {day} at {time}",
    "does {day} at {time} work for you",
    "okay i have you down for {day} at {time}",
    "is there anything else i can help you with",
    "please hold while i check on that",
    "thank you for holding",
    "i am sorry to hear that",
    "i can transfer you to {biz}",
    "let me transfer you to {biz}",
    "the total comes to {d1} {d2} dollars",
    "your confirmation number is {d1} {d2} {d3} {d4}",
    "we are open {day} from {time} to {time}",
    "for sales press one",
    "for service press two",
    "for parts and accessories press three",
    "for all other inquiries press zero",
    "or press two to speak with customer care",
    "please call back during normal business hours",
    "our office is currently closed",
    "please leave your name and number after the tone",
    "in a few words please tell me why you are calling",
    "we also offer a free tire pressure check",
    "what year is your {vehicle}",
    "we have the part for your {vehicle} in stock",
    "you have a great day",
    "have a great day",
    "thanks for calling {name} will call you back",
    "i will send that over by email",
    "it's no problem at all",
    "that's all set for {day}",
    "you're all set",
    "we're open until {time} {day}",
    "you should see the refund in three to five business days",
]

CALLER = [
    "hi i need to schedule {thing}",
    "hi i am calling about {thing}",
    "yes i would like to make {thing}",
    "i was wondering if i could get {thing} for {day}",
    "my name is {name}",
    "yes my name is {name} {lname}",
    "my number is {d1} {d2} {d3} {d4} {d5} {d6} {d7}",
    "it is {d1} {d2} {d3} {d4}",
    "the last four are {d1} {d2} {d3} {d4}",
    "{day} at {time} works for me",
    "{day} would be better for me",
    "do you have anything on {day}",
    "yeah that'd be great",
    "yes that would be great",
    "okay thanks so much",
    "okay thank you so much",
    "thank you very much",
    "no that is all thank you",
    "you too have a great day",
    "i don't have an account",
    "i don't have an account with you yet",
    "i have a {vehicle} and {issue}",
    "hi {issue}",
    "yeah {issue} since {day}",
    "how much would that cost",
    "how long will it take",
    "do you take insurance",
    "can i pay with a card",
    "is {name} there",
    "can i speak to {name} please",
    "i was told to call {biz}",
    "b. as in boy",
    "that is b. as in boy and {d1}",
    "eight two one zero",
    "the zip code is {d1} {d2} {d3} {d4} {d5}",
    "i just need to cancel {thing}",
    "can you check on the status of {thing}",
    "it is for my {vehicle}",
    "okay i will hold",
    "sure no problem",
    "yes that is correct",
    "no i don't think so",
    "what time do you close {day}",
    "i will be there at {time}",
    "it's for my {vehicle}",
    "it's {d1} {d2} {d3} {d4}",
    "i think it's {day}",
    "it's been a while since {issue}",
    "that's fine",
    "that's great thank you",
    "i'm calling about {thing}",
    "what's the earliest you have",
]


def fill(t):
    return t.format(biz=rng.choice(BUSINESSES), name=rng.choice(NAMES),
                    lname=rng.choice(NAMES), day=rng.choice(DAYS),
                    time=rng.choice(TIMES), thing=rng.choice(THINGS),
                    vehicle=rng.choice(VEHICLES), issue=rng.choice(ISSUES),
                    **{f"d{i}": rng.choice(DIGITS) for i in range(1, 8)})


def sentences(n):
    out = []
    for _ in range(n):
        out.append(fill(rng.choice(AGENT if rng.random() < 0.5 else CALLER)))
    return out


train = sentences(3000)
normal = []
seen = set(train)
while len(normal) < 50:
    s = fill(rng.choice(AGENT + CALLER))
    if len(s.split()) >= 4 and s not in seen and s not in normal:
        normal.append(s)

with open("train.txt", "w") as f:
    f.write("\n".join(train) + "\n")
with open("normal_sentences.txt", "w") as f:
    f.write("\n".join(normal) + "\n")
